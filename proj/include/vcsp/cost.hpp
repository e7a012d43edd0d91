#pragma once

#include <gmpxx.h>

#include <compare>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vcsp {

using Rational = mpq_class;

/// Malformed input: bad tables, out-of-range labels, schema violations.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configured search or enumeration limit was exceeded.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses an exact rational from "n", "-n" or "p/q". Throws InputError.
Rational parse_rational(std::string_view text);

/// "n" for integers, "p/q" otherwise (canonical form).
std::string to_string(const Rational& q);

/// An extended cost: an exact rational or infinity. Infinity absorbs
/// addition and compares above every finite value.
///
/// Finite values are not forced to be non-negative here so that malformed
/// tables can be represented and reported; CostFunction::check enforces it.
class Cost {
public:
    Cost() = default;
    Cost(Rational value) : value_(std::move(value)) { value_.canonicalize(); }
    Cost(long value) : value_(value) {}
    Cost(int value) : value_(value) {}

    static Cost infinity()
    {
        Cost c;
        c.infinite_ = true;
        return c;
    }

    bool is_finite() const { return !infinite_; }
    bool is_infinite() const { return infinite_; }

    /// Precondition: is_finite().
    const Rational& value() const
    {
        if (infinite_) throw std::logic_error("value() on infinite cost");
        return value_;
    }

    Cost& operator+=(const Cost& other)
    {
        if (other.infinite_) {
            infinite_ = true;
            value_ = 0;
        } else if (!infinite_) {
            value_ += other.value_;
        }
        return *this;
    }

    friend Cost operator+(Cost lhs, const Cost& rhs)
    {
        lhs += rhs;
        return lhs;
    }

    /// Adds a finite (possibly negative) offset; infinity stays infinite.
    Cost shifted(const Rational& delta) const
    {
        if (infinite_) return *this;
        return Cost(Rational(value_ + delta));
    }

    friend bool operator==(const Cost& a, const Cost& b)
    {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }

    friend std::strong_ordering operator<=>(const Cost& a, const Cost& b)
    {
        if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
        int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    /// "inf", "n" or "p/q".
    std::string to_string() const;

    /// Inverse of to_string(); also accepts "-n". Throws InputError.
    static Cost parse(std::string_view text);

private:
    Rational value_{0};
    bool infinite_ = false;
};

inline std::ostream& operator<<(std::ostream& os, const Cost& c) { return os << c.to_string(); }

}  // namespace vcsp
