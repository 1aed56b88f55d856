#include "knotlab/poly.hpp"

#include <sstream>
#include <stdexcept>

namespace knotlab {

LaurentPoly LaurentPoly::monomial(int exponent, BigInt coeff) {
    LaurentPoly p;
    p.add(exponent, coeff);
    return p;
}

BigInt LaurentPoly::coeff(int exponent) const {
    auto it = terms_.find(exponent);
    return it == terms_.end() ? BigInt(0) : it->second;
}

void LaurentPoly::add(int exponent, const BigInt& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(exponent, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
    LaurentPoly r;
    for (const auto& [ea, ca] : terms_)
        for (const auto& [eb, cb] : o.terms_) r.add(ea + eb, ca * cb);
    return r;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
    LaurentPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add(e, c);
    return r;
}

namespace {

template <class It>
std::string render(It begin, It end, const std::string& var) {
    std::ostringstream os;
    bool first = true;
    for (auto it = begin; it != end; ++it) {
        const int e = it->first;
        BigInt c = it->second;
        if (c == 0) continue;
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        if (c < 0) c = -c;
        if (c != 1 || e == 0) os << c;
        if (e != 0) {
            os << var;
            if (e != 1) os << "^" << e;
        }
        first = false;
    }
    return first ? "0" : os.str();
}

}  // namespace

std::string LaurentPoly::to_string(const std::string& var) const { return render(terms_.begin(), terms_.end(), var); }

IntPoly::IntPoly(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { trim(); }

void IntPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

BigInt IntPoly::eval(const BigInt& x) const {
    BigInt r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
}

IntPoly IntPoly::operator+(const IntPoly& o) const {
    std::vector<BigInt> r(std::max(c_.size(), o.c_.size()));
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return IntPoly(std::move(r));
}

IntPoly IntPoly::operator-() const {
    auto r = c_;
    for (auto& x : r) x = -x;
    return IntPoly(std::move(r));
}

IntPoly IntPoly::operator-(const IntPoly& o) const { return *this + (-o); }

IntPoly IntPoly::operator*(const IntPoly& o) const {
    if (c_.empty() || o.c_.empty()) return {};
    std::vector<BigInt> r(c_.size() + o.c_.size() - 1);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    }
    return IntPoly(std::move(r));
}

IntPoly IntPoly::exact_div(const IntPoly& d) const {
    if (d.is_zero()) throw std::domain_error("polynomial division by zero");
    if (is_zero()) return {};
    if (degree() < d.degree()) throw std::domain_error("inexact polynomial division");
    std::vector<BigInt> rem = c_;
    std::vector<BigInt> q(c_.size() - d.c_.size() + 1);
    const BigInt& lead = d.c_.back();
    for (std::size_t k = q.size(); k-- > 0;) {
        const BigInt& top = rem[k + d.c_.size() - 1];
        if (top == 0) continue;
        if (top % lead != 0) throw std::domain_error("inexact polynomial division");
        q[k] = top / lead;
        for (std::size_t j = 0; j < d.c_.size(); ++j) rem[k + j] -= q[k] * d.c_[j];
    }
    for (const auto& x : rem)
        if (x != 0) throw std::domain_error("inexact polynomial division");
    return IntPoly(std::move(q));
}

std::string IntPoly::to_string(const std::string& var) const {
    std::map<int, BigInt> m;
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (c_[i] != 0) m[static_cast<int>(i)] = c_[i];
    return render(m.begin(), m.end(), var);
}

}  // namespace knotlab
