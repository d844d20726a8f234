#pragma once

#include <Eigen/Dense>

namespace dsps::quantum {

using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// Atomic levels in basis order.
enum class Level : int { excited = 0, ground = 1, sideband_ground = 2, shelf = 3 };

enum class Factor : int { atom = 0, cavity = 1, waveguide = 2 };

struct BasisState {
    Level level;
    int cavity;
    int waveguide;
};

// Atom (4 levels) x cavity Fock x waveguide Fock, in that tensor order.
class HilbertSpace {
public:
    static constexpr int atomic_dim = 4;

    explicit HilbertSpace(int max_cavity_photons = 2, int max_waveguide_photons = 2);

    int max_cavity_photons() const { return cavity_dim_ - 1; }
    int max_waveguide_photons() const { return waveguide_dim_ - 1; }
    int cavity_dim() const { return cavity_dim_; }
    int waveguide_dim() const { return waveguide_dim_; }
    int factor_dim(Factor factor) const;
    int dim() const { return atomic_dim * cavity_dim_ * waveguide_dim_; }

    int index(Level level, int cavity, int waveguide) const;
    BasisState state(int index) const;

    bool operator==(const HilbertSpace&) const = default;

private:
    int cavity_dim_;
    int waveguide_dim_;
};

struct DensityMatrix {
    Operator entries;
    double time_s = 0.0;
};

// |to><from| on the atomic factor.
Operator transition(Level to, Level from);
Operator annihilation(int dim);
Operator number_operator(int dim);

// identity (x) ... (x) op (x) ... (x) identity on the full space.
Operator embed(const Operator& op, Factor factor, const HilbertSpace& space);

Operator ground_state_projector(const HilbertSpace& space);
DensityMatrix ground_state(const HilbertSpace& space);

}  // namespace dsps::quantum
