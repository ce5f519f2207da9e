#include "cmlp/activation.hpp"

#include <cmath>
#include <numbers>

namespace cmlp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double ActivationKind::apply(double z) const {
    switch (tag) {
        case Tag::Gaussian:
            return std::exp(-(z * z) / (2.0 * param * param));
        case Tag::Sine:
            return std::sin(kTwoPi * param * z);
        case Tag::Relu:
            return z > 0.0 ? z : 0.0;
    }
    return 0.0;
}

double ActivationKind::derivative(double z) const {
    switch (tag) {
        case Tag::Gaussian:
            return -(z / (param * param)) * std::exp(-(z * z) / (2.0 * param * param));
        case Tag::Sine:
            return kTwoPi * param * std::cos(kTwoPi * param * z);
        case Tag::Relu:
            return z > 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

std::string ActivationKind::name() const {
    switch (tag) {
        case Tag::Gaussian: return "gaussian";
        case Tag::Sine: return "sine";
        case Tag::Relu: return "relu";
    }
    return "?";
}

ActivationKind activation_from_name(const std::string& name, double param) {
    if (name == "gaussian") return ActivationKind::gaussian(param);
    if (name == "sine") return ActivationKind::sine(param);
    if (name == "relu") return ActivationKind::relu();
    throw std::invalid_argument("unknown activation: " + name);
}

}  // namespace cmlp
