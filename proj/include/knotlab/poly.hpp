#pragma once

#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace knotlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Sparse Laurent polynomial; zero coefficients are never stored.
class LaurentPoly {
public:
    LaurentPoly() = default;
    static LaurentPoly monomial(int exponent, BigInt coeff = 1);

    const std::map<int, BigInt>& terms() const { return terms_; }
    BigInt coeff(int exponent) const;
    void add(int exponent, const BigInt& c);
    bool is_zero() const { return terms_.empty(); }
    int min_degree() const { return terms_.begin()->first; }
    int max_degree() const { return terms_.rbegin()->first; }

    LaurentPoly operator*(const LaurentPoly& o) const;
    LaurentPoly operator+(const LaurentPoly& o) const;
    bool operator==(const LaurentPoly& o) const = default;

    std::string to_string(const std::string& var = "t") const;

private:
    std::map<int, BigInt> terms_;
};

// Dense polynomial in one variable with non-negative exponents, trimmed.
class IntPoly {
public:
    IntPoly() = default;
    explicit IntPoly(std::vector<BigInt> coeffs);
    static IntPoly constant(const BigInt& c) { return IntPoly({c}); }

    const std::vector<BigInt>& coeffs() const { return c_; }
    BigInt coeff(std::size_t k) const { return k < c_.size() ? c_[k] : BigInt(0); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    BigInt eval(const BigInt& x) const;

    IntPoly operator+(const IntPoly& o) const;
    IntPoly operator-(const IntPoly& o) const;
    IntPoly operator*(const IntPoly& o) const;
    IntPoly operator-() const;
    // Exact division; throws if the remainder is nonzero.
    IntPoly exact_div(const IntPoly& d) const;
    bool operator==(const IntPoly& o) const = default;

    std::string to_string(const std::string& var = "t") const;

private:
    void trim();
    std::vector<BigInt> c_;
};

}  // namespace knotlab
