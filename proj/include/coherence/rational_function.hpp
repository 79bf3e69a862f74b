#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coherence/polynomial.hpp"

namespace coherence {

/// Relative tolerance used when cancelling near-common factors.
inline constexpr double kCancellationTolerance = 1e-9;

/// Returned by RationalFunction::eval at a pole.
inline const Complex kComplexInfinity{std::numeric_limits<double>::infinity(), 0.0};

inline bool is_infinite(const Complex& z) noexcept { return std::isinf(z.real()) || std::isinf(z.imag()); }

/**
 * @brief Real-coefficient SISO transfer function num(s)/den(s).
 *
 * Always held in reduced canonical form: common factors are cancelled (up to
 * kCancellationTolerance) and numerator and denominator are scaled by a power
 * of two so the denominator's leading coefficient lies in [1, 2). The scaling
 * is exact, which keeps reciprocal() lossless and lets functions reached by
 * different exact routes compare bitwise equal. monic() gives the
 * conventional monic-denominator form. The zero function is 0/1.
 */
class RationalFunction {
   public:
    RationalFunction() : num_(), den_(Polynomial::constant(1.0)) {}
    RationalFunction(Polynomial num, Polynomial den);
    RationalFunction(std::vector<double> num, std::vector<double> den)
        : RationalFunction(Polynomial(std::move(num)), Polynomial(std::move(den))) {}
    RationalFunction(std::initializer_list<double> num, std::initializer_list<double> den)
        : RationalFunction(Polynomial(num), Polynomial(den)) {}

    static RationalFunction constant(double c) { return {Polynomial::constant(c), Polynomial::constant(1.0)}; }

    const Polynomial& num() const noexcept { return num_; }
    const Polynomial& den() const noexcept { return den_; }

    bool is_zero() const noexcept { return num_.is_zero(); }
    bool is_proper() const noexcept { return is_zero() || num_.degree() <= den_.degree(); }
    bool is_strictly_proper() const noexcept { return is_zero() || num_.degree() < den_.degree(); }

    /// num(s)/den(s); kComplexInfinity at a pole. Throws Indeterminate when
    /// both vanish, which only happens if canonicalization was defeated.
    Complex eval(Complex s) const;
    Complex operator()(Complex s) const { return eval(s); }

    /// den/num in canonical form; throws ZeroFunction for the zero function.
    RationalFunction reciprocal() const;
    RationalFunction scaled(double c) const;

    /// (num, den) rescaled so den is monic.
    std::pair<Polynomial, Polynomial> monic() const;

    std::vector<Complex> poles() const;
    std::vector<Complex> zeros() const;

    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
    friend bool             operator==(const RationalFunction& a, const RationalFunction& b) = default;

   private:
    struct Canonical {};
    RationalFunction(Canonical, Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {}

    Polynomial num_;
    Polynomial den_;
};

enum class ArithmeticOp { add, mul };

RationalFunction arithmetic(const RationalFunction& a, const RationalFunction& b, ArithmeticOp op);

/**
 * (sum_i g_i^-1)^-1, formed with exact polynomial arithmetic. Reciprocals that
 * share a denominator are summed coefficient-wise with correct rounding and the
 * remaining groups are combined in a canonical order, so the result does not
 * depend on the order of the inputs.
 */
RationalFunction inverse_sum(std::span<const RationalFunction> gs);

/// ((1/n) sum_i g_i^-1)^-1. Returns the common function unchanged when all
/// inputs are identical.
RationalFunction harmonic_mean(std::span<const RationalFunction> gs);

/// Text form `num=[...], den=[...]` with ascending coefficients, scaled so the
/// numerator is monic (the zero function prints as `num=[0], den=[1]`).
std::string to_text(const RationalFunction& r);

/// Parses the text form produced by to_text (any scaling is accepted).
RationalFunction parse_rational(std::string_view text);

}  // namespace coherence
