#include "dsps/quantum/hilbert_space.hpp"

#include <cmath>
#include <string>

#include "dsps/errors.hpp"

namespace dsps::quantum {

HilbertSpace::HilbertSpace(int max_cavity_photons, int max_waveguide_photons)
    : cavity_dim_(max_cavity_photons + 1), waveguide_dim_(max_waveguide_photons + 1) {
    if (max_cavity_photons < 1 || max_waveguide_photons < 1) {
        throw ConfigError("Fock truncation must admit at least one photon per mode");
    }
}

int HilbertSpace::factor_dim(Factor factor) const {
    switch (factor) {
        case Factor::atom: return atomic_dim;
        case Factor::cavity: return cavity_dim_;
        case Factor::waveguide: return waveguide_dim_;
    }
    return 0;
}

int HilbertSpace::index(Level level, int cavity, int waveguide) const {
    const int a = static_cast<int>(level);
    if (a < 0 || a >= atomic_dim || cavity < 0 || cavity >= cavity_dim_ || waveguide < 0 ||
        waveguide >= waveguide_dim_) {
        throw ConfigError("basis label out of range");
    }
    return (a * cavity_dim_ + cavity) * waveguide_dim_ + waveguide;
}

BasisState HilbertSpace::state(int index) const {
    if (index < 0 || index >= dim()) throw ConfigError("basis index out of range");
    const int waveguide = index % waveguide_dim_;
    const int rest = index / waveguide_dim_;
    return {static_cast<Level>(rest / cavity_dim_), rest % cavity_dim_, waveguide};
}

Operator transition(Level to, Level from) {
    Operator op = Operator::Zero(HilbertSpace::atomic_dim, HilbertSpace::atomic_dim);
    op(static_cast<int>(to), static_cast<int>(from)) = 1.0;
    return op;
}

Operator annihilation(int dim) {
    Operator op = Operator::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) op(n - 1, n) = std::sqrt(static_cast<double>(n));
    return op;
}

Operator number_operator(int dim) {
    Operator op = Operator::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) op(n, n) = static_cast<double>(n);
    return op;
}

namespace {

Operator kron(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace

Operator embed(const Operator& op, Factor factor, const HilbertSpace& space) {
    const int d = space.factor_dim(factor);
    if (op.rows() != d || op.cols() != d) {
        throw ConfigError("operator dimension " + std::to_string(op.rows()) +
                          " does not match factor dimension " + std::to_string(d));
    }
    Operator parts[3] = {
        Operator::Identity(HilbertSpace::atomic_dim, HilbertSpace::atomic_dim),
        Operator::Identity(space.cavity_dim(), space.cavity_dim()),
        Operator::Identity(space.waveguide_dim(), space.waveguide_dim()),
    };
    parts[static_cast<int>(factor)] = op;
    return kron(kron(parts[0], parts[1]), parts[2]);
}

Operator ground_state_projector(const HilbertSpace& space) {
    Operator p = Operator::Zero(space.dim(), space.dim());
    const int g = space.index(Level::ground, 0, 0);
    p(g, g) = 1.0;
    return p;
}

DensityMatrix ground_state(const HilbertSpace& space) {
    return DensityMatrix{ground_state_projector(space), 0.0};
}

}  // namespace dsps::quantum
