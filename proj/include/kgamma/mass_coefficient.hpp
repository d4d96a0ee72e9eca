#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace kgamma {

// Nonnegative locally bounded weight c(s) of the intrinsic form. Named
// variants carry analytic knowledge of \int c(s) e^{-s} ds; custom ones must
// declare it.
class MassCoefficient {
  public:
    enum class Kind { one, linear, quadratic, cubic, custom };

    static MassCoefficient one() { return MassCoefficient(Kind::one, "1"); }
    static MassCoefficient linear() { return MassCoefficient(Kind::linear, "s"); }
    static MassCoefficient quadratic() { return MassCoefficient(Kind::quadratic, "s2"); }

    static MassCoefficient cubic(double a1, double a2, double a3) {
        if (a1 < 0.0 || a2 < 0.0 || a3 < 0.0 || (a1 == 0.0 && a2 == 0.0 && a3 == 0.0))
            throw std::invalid_argument(
                "MassCoefficient::cubic: needs a_i >= 0 with max > 0");
        MassCoefficient c(Kind::cubic, "cubic");
        c.a1_ = a1;
        c.a2_ = a2;
        c.a3_ = a3;
        return c;
    }

    static MassCoefficient custom(std::function<double(double)> fn,
                                  bool integrable_exp, std::string label) {
        MassCoefficient c(Kind::custom, std::move(label));
        c.fn_ = std::move(fn);
        c.integrable_exp_ = integrable_exp;
        return c;
    }

    double operator()(double s) const {
        switch (kind_) {
            case Kind::one: return 1.0;
            case Kind::linear: return s;
            case Kind::quadratic: return s * s;
            case Kind::cubic: return a1_ * s + a2_ * s * s + a3_ * s * s * s;
            case Kind::custom: return fn_(s);
        }
        return 0.0;
    }

    // true iff \int_0^inf c(s) e^{-s} ds < inf; analytic for named variants.
    bool integrable_exp() const {
        return kind_ == Kind::custom ? integrable_exp_ : true;
    }

    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    double cubic_a1() const { return a1_; }
    double cubic_a2() const { return a2_; }
    double cubic_a3() const { return a3_; }

  private:
    MassCoefficient(Kind kind, std::string label)
        : kind_(kind), label_(std::move(label)) {}

    Kind kind_;
    std::string label_;
    double a1_ = 0.0, a2_ = 0.0, a3_ = 0.0;
    std::function<double(double)> fn_;
    bool integrable_exp_ = true;
};

}  // namespace kgamma
