#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace dainf {

using Int = boost::multiprecision::cpp_int;

class DainfError : public std::runtime_error {
  public:
    explicit DainfError(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public DainfError {
  public:
    explicit DimensionMismatch(const std::string& what) : DainfError(what) {}
};

enum class RingKind { integers, rationals, prime_field, integers_mod };

/* Exact coefficient rings: Z, Q, F_p, Z/n. Elements are normalized on
 * construction; equality is decidable everywhere. */
class Ring {
  public:
    Ring() : kind_(RingKind::integers), modulus_(0) {}

    static Ring integers() { return Ring(RingKind::integers, 0); }
    static Ring rationals() { return Ring(RingKind::rationals, 0); }
    static Ring prime_field(const Int& p);
    static Ring integers_mod(const Int& n);

    RingKind kind() const { return kind_; }
    const Int& modulus() const { return modulus_; }
    bool is_field() const { return kind_ == RingKind::rationals || kind_ == RingKind::prime_field; }
    bool is_modular() const { return kind_ == RingKind::prime_field || kind_ == RingKind::integers_mod; }

    bool operator==(const Ring& o) const { return kind_ == o.kind_ && modulus_ == o.modulus_; }
    bool operator!=(const Ring& o) const { return !(*this == o); }

    std::string name() const;

  private:
    Ring(RingKind k, Int m) : kind_(k), modulus_(std::move(m)) {}
    RingKind kind_;
    Int modulus_;
};

/* A ring element. Over Q: reduced fraction with den > 0. Elsewhere den == 1,
 * and over modular rings num lies in [0, n). */
struct Scalar {
    Int num;
    Int den;
    Scalar() : num(0), den(1) {}
    Scalar(Int n, Int d) : num(std::move(n)), den(std::move(d)) {}
};

inline bool is_zero(const Scalar& a) { return a.num == 0; }
inline bool operator==(const Scalar& a, const Scalar& b) { return a.num == b.num && a.den == b.den; }
inline bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }
inline bool scalar_less(const Scalar& a, const Scalar& b) {
    if (a.num != b.num) return a.num < b.num;
    return a.den < b.den;
}

Scalar canon(const Ring& ring, Int num, Int den = 1);

Scalar add(const Ring& ring, const Scalar& a, const Scalar& b);
Scalar sub(const Ring& ring, const Scalar& a, const Scalar& b);
Scalar mul(const Ring& ring, const Scalar& a, const Scalar& b);
Scalar neg(const Ring& ring, const Scalar& a);
Scalar from_int(const Ring& ring, long v);
Scalar from_int(const Ring& ring, const Int& v);

bool is_unit(const Ring& ring, const Scalar& a);
std::optional<Scalar> inverse(const Ring& ring, const Scalar& a);
/* Exact division: some x with b*x == a, if one exists. */
std::optional<Scalar> divide(const Ring& ring, const Scalar& a, const Scalar& b);

std::string to_string(const Scalar& a);
Scalar parse_scalar(const Ring& ring, const std::string& text);

Int gcd(Int a, Int b);
/* g = gcd(a,b) together with x,y satisfying a*x + b*y = g. */
struct Xgcd {
    Int g, x, y;
};
Xgcd xgcd(const Int& a, const Int& b);

}  // namespace dainf
