#ifndef FIBINT_MODEL_HPP
#define FIBINT_MODEL_HPP

#include "fibint/beam.hpp"
#include "fibint/common.hpp"
#include "fibint/potential_laws.hpp"

namespace fibint {

enum class Formulation { averaged, straightforward };

/// Two interacting beams with a stacked global DOF vector:
/// beam x control points first, then beam y, two DOFs each.
struct TwoBeamModel {
    BSplineBeam beam_x;
    BSplineBeam beam_y;

    int n_dofs() const { return beam_x.n_dofs() + beam_y.n_dofs(); }
    int offset(int beam) const { return beam == 0 ? 0 : beam_x.n_dofs(); }
    const BSplineBeam& beam(int id) const { return id == 0 ? beam_x : beam_y; }

    template <class T>
    auto beam_dofs(const Eigen::Matrix<T, Eigen::Dynamic, 1>& q, int beam) const {
        return q.segment(offset(beam), this->beam(beam).n_dofs());
    }

    SectionPairGeometry geometry(double beta_x, double beta_y) const {
        return SectionPairGeometry{beam_x.section().R, beam_y.section().R, beta_x, beta_y};
    }
};

}  // namespace fibint

#endif
