#include "pdmp/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "pdmp/error.hpp"

namespace pdmp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

JumpKernel JumpKernel::mixture(std::vector<std::pair<double, JumpKernel>> parts) {
  Mixture m;
  m.components.reserve(parts.size());
  for (auto& [w, k] : parts) m.components.push_back(MixtureComponent{w, std::move(k)});
  return JumpKernel(std::move(m));
}

JumpKernel JumpKernel::pushforward(JumpKernel base, std::function<double(double)> forward,
                                   std::function<double(double)> inverse) {
  return JumpKernel(Pushforward{std::make_shared<const JumpKernel>(std::move(base)),
                                std::move(forward), std::move(inverse)});
}

std::string JumpKernel::kind() const {
  return std::visit(overloaded{[](const Dirac&) { return std::string("dirac"); },
                               [](const Uniform&) { return std::string("uniform"); },
                               [](const Mixture&) { return std::string("mixture"); },
                               [](const Pushforward&) { return std::string("pushforward"); }},
                    v_);
}

void JumpKernel::validate() const {
  std::visit(overloaded{
                 [](const Dirac& d) {
                   if (!std::isfinite(d.at)) throw Error(Errc::InvalidKernel, "dirac location not finite");
                 },
                 [](const Uniform& u) {
                   if (!(std::isfinite(u.lo) && std::isfinite(u.hi) && u.lo < u.hi))
                     throw Error(Errc::InvalidKernel, "uniform kernel needs finite lo < hi");
                 },
                 [](const Mixture& m) {
                   if (m.components.empty()) throw Error(Errc::InvalidKernel, "empty mixture");
                   double total = 0.0;
                   for (const auto& c : m.components) {
                     if (!(c.weight >= 0.0)) throw Error(Errc::InvalidKernel, "negative mixture weight");
                     total += c.weight;
                     c.kernel.validate();
                   }
                   if (std::abs(total - 1.0) > 1e-12)
                     throw Error(Errc::InvalidKernel, "mixture weights do not sum to 1");
                 },
                 [](const Pushforward& p) {
                   if (!p.base || !p.forward || !p.inverse)
                     throw Error(Errc::InvalidKernel, "incomplete pushforward");
                   p.base->validate();
                 }},
             v_);
}

std::pair<std::size_t, double> JumpKernel::select_component(double u) const {
  const auto* m = std::get_if<Mixture>(&v_);
  if (m == nullptr) return {0, u};
  double cum = 0.0;
  const std::size_t n = m->components.size();
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = m->components[j].weight;
    if (w <= 0.0) continue;
    last_positive = j;
    if (u < cum + w) return {j, std::clamp((u - cum) / w, 0.0, 1.0)};
    cum += w;
  }
  // rounding left u beyond the accumulated mass
  const double w = m->components[last_positive].weight;
  return {last_positive, std::clamp((u - (cum - w)) / w, 0.0, 1.0)};
}

double JumpKernel::sample(double u) const {
  return std::visit(overloaded{[](const Dirac& d) { return d.at; },
                               [u](const Uniform& k) { return k.lo + u * (k.hi - k.lo); },
                               [this, u](const Mixture& m) {
                                 const auto [j, v] = select_component(u);
                                 return m.components[j].kernel.sample(v);
                               },
                               [u](const Pushforward& p) { return p.forward(p.base->sample(u)); }},
                    v_);
}

double JumpKernel::cdf(double x) const {
  return std::visit(overloaded{[x](const Dirac& d) { return x >= d.at ? 1.0 : 0.0; },
                               [x](const Uniform& k) { return std::clamp((x - k.lo) / (k.hi - k.lo), 0.0, 1.0); },
                               [x](const Mixture& m) {
                                 double s = 0.0;
                                 for (const auto& c : m.components) s += c.weight * c.kernel.cdf(x);
                                 return std::min(s, 1.0);
                               },
                               [this, x](const Pushforward& p) {
                                 if (x < lower()) return 0.0;
                                 if (x >= upper()) return 1.0;
                                 return p.base->cdf(p.inverse(x));
                               }},
                    v_);
}

double JumpKernel::cdf_left(double x) const {
  return std::visit(overloaded{[x](const Dirac& d) { return x > d.at ? 1.0 : 0.0; },
                               [this, x](const Uniform&) { return cdf(x); },
                               [x](const Mixture& m) {
                                 double s = 0.0;
                                 for (const auto& c : m.components) s += c.weight * c.kernel.cdf_left(x);
                                 return std::min(s, 1.0);
                               },
                               [this, x](const Pushforward& p) {
                                 if (x <= lower()) return 0.0;
                                 if (x > upper()) return 1.0;
                                 return p.base->cdf_left(p.inverse(x));
                               }},
                    v_);
}

double JumpKernel::lower() const {
  return std::visit(overloaded{[](const Dirac& d) { return d.at; },
                               [](const Uniform& k) { return k.lo; },
                               [](const Mixture& m) {
                                 double lo = INFINITY;
                                 for (const auto& c : m.components)
                                   if (c.weight > 0.0) lo = std::min(lo, c.kernel.lower());
                                 return lo;
                               },
                               [](const Pushforward& p) { return p.forward(p.base->lower()); }},
                    v_);
}

double JumpKernel::upper() const {
  return std::visit(overloaded{[](const Dirac& d) { return d.at; },
                               [](const Uniform& k) { return k.hi; },
                               [](const Mixture& m) {
                                 double hi = -INFINITY;
                                 for (const auto& c : m.components)
                                   if (c.weight > 0.0) hi = std::max(hi, c.kernel.upper());
                                 return hi;
                               },
                               [](const Pushforward& p) { return p.forward(p.base->upper()); }},
                    v_);
}

bool JumpKernel::in_support(double x) const {
  return std::visit(overloaded{[x](const Dirac& d) { return x == d.at; },
                               [x](const Uniform& k) { return k.lo <= x && x <= k.hi; },
                               [x](const Mixture& m) {
                                 return std::any_of(m.components.begin(), m.components.end(), [x](const auto& c) {
                                   return c.weight > 0.0 && c.kernel.in_support(x);
                                 });
                               },
                               [this, x](const Pushforward&) { return lower() <= x && x <= upper(); }},
                    v_);
}

}  // namespace pdmp
