#include "dainf/scalar.hpp"

#include <boost/multiprecision/miller_rabin.hpp>

namespace dainf {

Int gcd(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Int r = a % b;
        a = b;
        b = r;
    }
    return a;
}

Xgcd xgcd(const Int& a, const Int& b) {
    Int old_r = a, r = b;
    Int old_s = 1, s = 0;
    Int old_t = 0, t = 1;
    while (r != 0) {
        Int q = old_r / r;
        Int tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
        tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    if (old_r < 0) {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    return Xgcd{old_r, old_s, old_t};
}

Ring Ring::prime_field(const Int& p) {
    if (p < 2 || !boost::multiprecision::miller_rabin_test(p, 32))
        throw DainfError("prime_field modulus is not prime: " + p.str());
    return Ring(RingKind::prime_field, p);
}

Ring Ring::integers_mod(const Int& n) {
    if (n < 2) throw DainfError("integers_mod modulus must be >= 2, got " + n.str());
    return Ring(RingKind::integers_mod, n);
}

std::string Ring::name() const {
    switch (kind_) {
        case RingKind::integers: return "Z";
        case RingKind::rationals: return "Q";
        case RingKind::prime_field: return "F_" + modulus_.str();
        case RingKind::integers_mod: return "Z/" + modulus_.str();
    }
    return "?";
}

Scalar canon(const Ring& ring, Int num, Int den) {
    if (den == 0) throw DainfError("zero denominator");
    switch (ring.kind()) {
        case RingKind::rationals: {
            if (den < 0) {
                den = -den;
                num = -num;
            }
            Int g = gcd(num, den);
            if (g > 1) {
                num /= g;
                den /= g;
            }
            if (num == 0) den = 1;
            return Scalar(std::move(num), std::move(den));
        }
        case RingKind::integers: {
            if (den != 1 && den != -1) {
                if (num % den != 0) throw DainfError("non-integral value over Z");
                num /= den;
            } else if (den == -1) {
                num = -num;
            }
            return Scalar(std::move(num), 1);
        }
        default: {
            const Int& n = ring.modulus();
            if (den != 1) {
                Scalar d = canon(ring, den, 1);
                auto dinv = inverse(ring, d);
                if (!dinv) throw DainfError("denominator not invertible mod " + n.str());
                Scalar nn = canon(ring, num, 1);
                return mul(ring, nn, *dinv);
            }
            num %= n;
            if (num < 0) num += n;
            return Scalar(std::move(num), 1);
        }
    }
}

Scalar add(const Ring& ring, const Scalar& a, const Scalar& b) {
    return canon(ring, a.num * b.den + b.num * a.den, a.den * b.den);
}

Scalar sub(const Ring& ring, const Scalar& a, const Scalar& b) {
    return canon(ring, a.num * b.den - b.num * a.den, a.den * b.den);
}

Scalar mul(const Ring& ring, const Scalar& a, const Scalar& b) {
    return canon(ring, a.num * b.num, a.den * b.den);
}

Scalar neg(const Ring& ring, const Scalar& a) { return canon(ring, -a.num, a.den); }

Scalar from_int(const Ring& ring, long v) { return canon(ring, Int(v), 1); }
Scalar from_int(const Ring& ring, const Int& v) { return canon(ring, v, 1); }

bool is_unit(const Ring& ring, const Scalar& a) {
    switch (ring.kind()) {
        case RingKind::rationals: return a.num != 0;
        case RingKind::integers: return a.num == 1 || a.num == -1;
        default: return gcd(a.num, ring.modulus()) == 1;
    }
}

std::optional<Scalar> inverse(const Ring& ring, const Scalar& a) {
    if (!is_unit(ring, a)) return std::nullopt;
    switch (ring.kind()) {
        case RingKind::rationals: return canon(ring, a.den, a.num);
        case RingKind::integers: return a;
        default: {
            Xgcd e = xgcd(a.num, ring.modulus());
            return canon(ring, e.x, 1);
        }
    }
}

std::optional<Scalar> divide(const Ring& ring, const Scalar& a, const Scalar& b) {
    if (is_zero(b)) {
        if (is_zero(a)) return from_int(ring, 0);
        if (ring.is_modular()) {
            /* b == 0: solvable iff n | a, i.e. a == 0 in the ring. */
            return std::nullopt;
        }
        return std::nullopt;
    }
    switch (ring.kind()) {
        case RingKind::rationals: return mul(ring, a, *inverse(ring, b));
        case RingKind::integers: {
            if (a.num % b.num != 0) return std::nullopt;
            return canon(ring, a.num / b.num, 1);
        }
        default: {
            /* Solve b*x = a mod n: solvable iff gcd(b,n) | a. */
            const Int& n = ring.modulus();
            Xgcd e = xgcd(b.num, n);
            if (a.num % e.g != 0) return std::nullopt;
            Int x = (a.num / e.g) * e.x;
            return canon(ring, x, 1);
        }
    }
}

std::string to_string(const Scalar& a) {
    if (a.den == 1) return a.num.str();
    return a.num.str() + "/" + a.den.str();
}

Scalar parse_scalar(const Ring& ring, const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return canon(ring, Int(text), 1);
        return canon(ring, Int(text.substr(0, slash)), Int(text.substr(slash + 1)));
    } catch (const std::exception& e) {
        throw DainfError("bad scalar literal '" + text + "': " + e.what());
    }
}

}  // namespace dainf
