#pragma once

#include <complex>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace coherence {

using Complex = std::complex<double>;

/**
 * @brief Real polynomial with coefficients in ascending degree order.
 *
 * Trailing (highest-degree) zeros are always stripped, so the zero polynomial
 * has an empty coefficient vector and degree() == kZeroDegree.
 */
class Polynomial {
   public:
    static constexpr int kZeroDegree = std::numeric_limits<int>::min();

    Polynomial() = default;
    Polynomial(std::vector<double> coeffs);
    Polynomial(std::initializer_list<double> coeffs) : Polynomial(std::vector<double>(coeffs)) {}

    static Polynomial constant(double c) { return Polynomial({c}); }
    static Polynomial monomial(int degree, double c = 1.0);

    const std::vector<double>& coeffs() const noexcept { return coeffs_; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    int degree() const noexcept { return is_zero() ? kZeroDegree : static_cast<int>(coeffs_.size()) - 1; }
    double leading() const noexcept { return is_zero() ? 0.0 : coeffs_.back(); }
    double operator[](std::size_t k) const noexcept { return k < coeffs_.size() ? coeffs_[k] : 0.0; }
    double max_abs() const noexcept;

    double  operator()(double x) const noexcept;
    Complex operator()(Complex s) const noexcept;

    Polynomial derivative() const;
    Polynomial monic() const;
    Polynomial scaled(double c) const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double c, const Polynomial& p) { return p.scaled(c); }
    friend bool       operator==(const Polynomial& a, const Polynomial& b) = default;

   private:
    void strip();

    std::vector<double> coeffs_;
};

/// Quotient and remainder of a / b. Throws ZeroFunction when b is zero.
std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b);

/**
 * Monic greatest common divisor of a and b, computed by a Euclidean remainder
 * sequence in which a remainder is treated as zero once its coefficients fall
 * below rel_tol times the size of the dividend. Returns the constant 1 when the
 * inputs are coprime at that tolerance.
 */
Polynomial gcd(const Polynomial& a, const Polynomial& b, double rel_tol = 1e-9);

/// All complex roots with multiplicity, from the eigenvalues of the balanced
/// companion matrix. Throws DegreeZero for constant (or zero) polynomials.
std::vector<Complex> roots(const Polynomial& p);

/// Correctly rounded sum of the values; the result does not depend on order.
double exact_sum(std::span<const double> values);

/// Coefficient-wise correctly rounded sum of polynomials.
Polynomial exact_sum(std::span<const Polynomial> terms);

}  // namespace coherence
