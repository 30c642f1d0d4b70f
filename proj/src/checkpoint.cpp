#include "mph/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mph {

namespace {

std::string hex_of(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(bits));
  return buf;
}

double double_of(const std::string& hex) {
  if (hex.size() != 16) throw std::runtime_error("checkpoint: bad double encoding '" + hex + "'");
  std::uint64_t bits = std::stoull(hex, nullptr, 16);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

void write_tensor(std::ostream& os, const std::string& name, const Tensor& t) {
  os << name << ' ' << t.shape.size();
  for (int d : t.shape) os << ' ' << d;
  for (double v : t.data) os << ' ' << hex_of(v);
  os << '\n';
}

Tensor read_tensor(std::istream& is, const std::string& expect) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("checkpoint: missing tensor " + expect);
  std::istringstream ss(line);
  std::string name;
  std::size_t rank;
  if (!(ss >> name >> rank) || name != expect)
    throw std::runtime_error("checkpoint: expected tensor " + expect);
  std::vector<int> shape(rank);
  for (auto& d : shape)
    if (!(ss >> d)) throw std::runtime_error("checkpoint: bad tensor shape");
  Tensor t(shape);
  std::string hex;
  for (auto& v : t.data) {
    if (!(ss >> hex)) throw std::runtime_error("checkpoint: tensor data truncated");
    v = double_of(hex);
  }
  return t;
}

std::string expect_line_tag(std::istream& is, const std::string& tag) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("checkpoint: missing " + tag + " line");
  if (line.rfind(tag + " ", 0) != 0 && line != tag)
    throw std::runtime_error("checkpoint: expected '" + tag + "', got '" + line + "'");
  return line.size() > tag.size() ? line.substr(tag.size() + 1) : std::string{};
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << "MPHCKPT v1\n";
  os << "variant " << variant_name(ck.net.variant) << '\n';
  os << "alpha " << hex_of(ck.net.alpha) << '\n';
  os << "arch " << ck.net.in_channels << ' ' << ck.net.classes << ' ' << ck.net.grid_h << ' '
     << ck.net.grid_w << '\n';
  os << "divisors " << ck.channel_divisors.size();
  for (double d : ck.channel_divisors) os << ' ' << hex_of(d);
  os << '\n';

  const auto params = ck.net.params();
  os << "params " << params.size() << '\n';
  for (std::size_t p = 0; p < params.size(); ++p)
    write_tensor(os, "p" + std::to_string(p), *params[p]);

  os << "adam " << ck.adam.step << ' ' << hex_of(ck.adam.lr) << ' ' << hex_of(ck.adam.beta1)
     << ' ' << hex_of(ck.adam.beta2) << ' ' << hex_of(ck.adam.epsilon) << '\n';
  for (std::size_t p = 0; p < ck.adam.m.size(); ++p)
    write_tensor(os, "m" + std::to_string(p), ck.adam.m[p]);
  for (std::size_t p = 0; p < ck.adam.v.size(); ++p)
    write_tensor(os, "v" + std::to_string(p), ck.adam.v[p]);

  os << "rng " << ck.rng_state << '\n';
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line) || line != "MPHCKPT v1")
    throw std::runtime_error("checkpoint: bad magic (expected MPHCKPT v1)");

  Checkpoint ck;
  const Variant variant = variant_from_name(expect_line_tag(is, "variant"));
  const double alpha = double_of(expect_line_tag(is, "alpha"));
  {
    std::istringstream ss(expect_line_tag(is, "arch"));
    int in_ch, classes, gh, gw;
    if (!(ss >> in_ch >> classes >> gh >> gw))
      throw std::runtime_error("checkpoint: bad arch line");
    ck.net = build_network(variant, in_ch, classes, gh, gw, alpha, 0);
  }
  {
    std::istringstream ss(expect_line_tag(is, "divisors"));
    std::size_t n;
    if (!(ss >> n)) throw std::runtime_error("checkpoint: bad divisors line");
    ck.channel_divisors.resize(n);
    std::string hex;
    for (auto& d : ck.channel_divisors) {
      if (!(ss >> hex)) throw std::runtime_error("checkpoint: divisors truncated");
      d = double_of(hex);
    }
  }

  auto params = ck.net.params();
  {
    std::istringstream ss(expect_line_tag(is, "params"));
    std::size_t n;
    if (!(ss >> n) || n != params.size())
      throw std::runtime_error("checkpoint: parameter count mismatch");
  }
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor t = read_tensor(is, "p" + std::to_string(p));
    if (!t.same_shape(*params[p]))
      throw std::runtime_error("checkpoint: parameter shape mismatch");
    *params[p] = std::move(t);
  }

  {
    std::istringstream ss(expect_line_tag(is, "adam"));
    std::string lr, b1, b2, eps;
    if (!(ss >> ck.adam.step >> lr >> b1 >> b2 >> eps))
      throw std::runtime_error("checkpoint: bad adam line");
    ck.adam.lr = double_of(lr);
    ck.adam.beta1 = double_of(b1);
    ck.adam.beta2 = double_of(b2);
    ck.adam.epsilon = double_of(eps);
  }
  for (std::size_t p = 0; p < params.size(); ++p)
    ck.adam.m.push_back(read_tensor(is, "m" + std::to_string(p)));
  for (std::size_t p = 0; p < params.size(); ++p)
    ck.adam.v.push_back(read_tensor(is, "v" + std::to_string(p)));

  ck.rng_state = expect_line_tag(is, "rng");
  return ck;
}

}  // namespace mph
