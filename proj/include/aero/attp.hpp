//
// Project     : aerosketch
// Module      : attp.hpp
// Description : at-the-time persistent sketch: threshold grows with the
//               running Frobenius mass, queries answerable at any past time
//

#ifndef AERO_ATTP_HPP
#define AERO_ATTP_HPP

#include "aero/sketch.hpp"

namespace aero {

class AttpState {
  public:
    AttpState(int d, double eps, RngState rng,
              std::optional<double> delta = std::nullopt)
        : inner_(d, eps, 0.0, rng, delta), amplified_(delta.has_value()), fro_mass_(0.0) {}

    void update(const Vector& a, std::int64_t i) {
        fro_mass_ += a.squaredNorm();
        inner_.set_theta(inner_.eps() * fro_mass_);
        if (amplified_) inner_.update_amplified(a, i);
        else inner_.update(a, i);
    }

    // sketch of the stream prefix ending at timestamp t
    Matrix query(std::int64_t t) const {
        if (t < 1 || t > inner_.clock()) throw InvalidInput("AttpState: t out of range");
        return inner_.query(0, t);
    }

    double fro_mass() const { return fro_mass_; }
    std::int64_t clock() const { return inner_.clock(); }
    const AeroState& inner() const { return inner_; }
    AeroState& inner() { return inner_; }

  private:
    AeroState inner_;
    bool amplified_;
    double fro_mass_;
};

}  // namespace aero

#endif  // AERO_ATTP_HPP
