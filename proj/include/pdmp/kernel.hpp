#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pdmp {

class JumpKernel;

struct Dirac {
  double at;
};

struct Uniform {
  double lo;
  double hi;
};

struct MixtureComponent;

struct Mixture {
  std::vector<MixtureComponent> components;
};

// Image of a base law under an increasing map. Sampling composes the base
// quantile with `forward`; the CDF pulls back through `inverse`.
struct Pushforward {
  std::shared_ptr<const JumpKernel> base;
  std::function<double(double)> forward;
  std::function<double(double)> inverse;
};

/// Post-jump law at the boundary: Dirac, uniform, finite mixture, or the
/// increasing image of one of those.
class JumpKernel {
 public:
  using Variant = std::variant<Dirac, Uniform, Mixture, Pushforward>;

  JumpKernel() : v_(Dirac{0.0}) {}
  explicit JumpKernel(Variant v) : v_(std::move(v)) {}

  static JumpKernel dirac(double at) { return JumpKernel(Dirac{at}); }
  static JumpKernel uniform(double lo, double hi) { return JumpKernel(Uniform{lo, hi}); }
  static JumpKernel mixture(std::vector<std::pair<double, JumpKernel>> parts);
  static JumpKernel pushforward(JumpKernel base, std::function<double(double)> forward,
                                std::function<double(double)> inverse);

  const Variant& variant() const noexcept { return v_; }
  std::string kind() const;

  bool is_dirac() const noexcept { return std::holds_alternative<Dirac>(v_); }

  /// Throws Error(InvalidKernel) on an empty interval or unnormalised mixture.
  void validate() const;

  /// Maps a uniform draw u in [0,1] to a sample. Monotone in u for Dirac,
  /// uniform and pushforward kernels; mixtures pick a component by u and
  /// rescale u inside the chosen block.
  double sample(double u) const;

  /// For mixtures: component index selected by u and the rescaled uniform.
  std::pair<std::size_t, double> select_component(double u) const;

  double cdf(double x) const;
  /// Left limit F(x-).
  double cdf_left(double x) const;

  double lower() const;
  double upper() const;
  bool in_support(double x) const;

 private:
  Variant v_;
};

struct MixtureComponent {
  double weight;
  JumpKernel kernel;
};

}  // namespace pdmp
