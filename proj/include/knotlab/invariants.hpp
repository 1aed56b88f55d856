#pragma once

#include "knotlab/diagram.hpp"
#include "knotlab/formula.hpp"
#include "knotlab/poly.hpp"

namespace knotlab {

long long casson_c2(const DiagramCode& d);
Rational v3(const DiagramCode& d);
long long defect(const DiagramCode& d);

// Fast paths used by the harness; chords are read from basepoint 0.
long long casson_c2(const BasedChords& ch);
Rational v3(const BasedChords& ch);
long long defect(const BasedChords& ch);

// Alexander polynomial with lowest exponent 0 and value +1 at t = 1.
IntPoly alexander(const DiagramCode& d);
// Symmetric form: Delta(t) = Delta(1/t), Delta(1) = 1.
LaurentPoly alexander_symmetric(const DiagramCode& d);
// Conway polynomial in z, from the symmetric Alexander polynomial.
IntPoly conway_from_alexander(const LaurentPoly& delta);
IntPoly conway(const DiagramCode& d);
BigInt determinant(const DiagramCode& d);

// Bracket in A with <unknot> = 1, by contracting crossings one at a time.
LaurentPoly kauffman_bracket(const DiagramCode& d, std::size_t max_crossings = 18);
// Jones polynomial in t = A^-4; refuses diagrams above the crossing guard.
LaurentPoly jones_oracle(const DiagramCode& d, std::size_t max_crossings = 18);

Rational c2_from_jones(const LaurentPoly& v);
Rational v3_from_jones(const LaurentPoly& v);

}  // namespace knotlab
