#pragma once

#include <stdexcept>
#include <string>

namespace cmlp {

// Hidden-layer activation: Gaussian bump exp(-z^2 / 2*sigma^2), sinusoid
// sin(2*pi*a*z), or ReLU. `param` is sigma for Gaussian and a for Sine.
struct ActivationKind {
    enum class Tag { Gaussian, Sine, Relu };

    Tag tag = Tag::Relu;
    double param = 0.0;

    static ActivationKind gaussian(double sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("Gaussian activation: sigma must be > 0");
        return {Tag::Gaussian, sigma};
    }
    static ActivationKind sine(double a) {
        if (!(a > 0.0)) throw std::invalid_argument("Sine activation: a must be > 0");
        return {Tag::Sine, a};
    }
    static ActivationKind relu() { return {Tag::Relu, 0.0}; }

    double apply(double z) const;
    // d(apply)/dz at z.
    double derivative(double z) const;

    std::string name() const;
};

ActivationKind activation_from_name(const std::string& name, double param);

}  // namespace cmlp
