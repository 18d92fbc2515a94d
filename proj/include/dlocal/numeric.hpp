#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace dlocal
{
    using BigInt = boost::multiprecision::cpp_int;
    using Rational = boost::multiprecision::cpp_rational;

    inline double to_double(const Rational& q) { return q.convert_to<double>(); }

    /// Exact binary fraction num / 2^exp, kept in lowest terms.
    class Dyadic
    {
    public:
        Dyadic() = default;
        Dyadic(long long v) : num_(v) {} // NOLINT(google-explicit-constructor)
        Dyadic(BigInt num, unsigned exp) : num_(std::move(num)), exp_(exp) { normalize(); }

        static Dyadic pow2_inverse(unsigned exp) { return Dyadic(BigInt(1), exp); }

        const BigInt& numerator() const noexcept { return num_; }
        unsigned exponent() const noexcept { return exp_; }
        bool is_zero() const noexcept { return num_.is_zero(); }

        Dyadic& operator+=(const Dyadic& o)
        {
            align_add(o, false);
            return *this;
        }
        Dyadic& operator-=(const Dyadic& o)
        {
            align_add(o, true);
            return *this;
        }
        friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
        friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
        friend Dyadic operator*(const Dyadic& a, const Dyadic& b) { return Dyadic(a.num_ * b.num_, a.exp_ + b.exp_); }

        /// Divides by 2^k.
        Dyadic scaled_down(unsigned k) const { return Dyadic(num_, exp_ + k); }

        friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.exp_ == b.exp_ && a.num_ == b.num_; }
        friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b)
        {
            BigInt l = a.num_, r = b.num_;
            if (a.exp_ < b.exp_)
                l <<= (b.exp_ - a.exp_);
            else
                r <<= (a.exp_ - b.exp_);
            if (l < r)
                return std::strong_ordering::less;
            if (l > r)
                return std::strong_ordering::greater;
            return std::strong_ordering::equal;
        }

        Rational to_rational() const { return Rational(num_, BigInt(1) << exp_); }

        double to_double() const
        {
            // Shift down very large exponents in two steps to avoid overflowing the intermediate.
            double v = num_.convert_to<double>();
            unsigned e = exp_;
            while (e > 1000)
            {
                v = std::ldexp(v, -1000);
                e -= 1000;
            }
            return std::ldexp(v, -static_cast<int>(e));
        }

        std::string str() const
        {
            if (exp_ == 0)
                return num_.str();
            return num_.str() + "/2^" + std::to_string(exp_);
        }

    private:
        void normalize()
        {
            if (num_.is_zero())
            {
                exp_ = 0;
                return;
            }
            if (exp_ == 0)
                return;
            const unsigned tz = static_cast<unsigned>(boost::multiprecision::lsb(abs(num_)));
            const unsigned k = tz < exp_ ? tz : exp_;
            num_ >>= k;
            exp_ -= k;
        }

        void align_add(const Dyadic& o, bool subtract)
        {
            if (o.exp_ > exp_)
            {
                num_ <<= (o.exp_ - exp_);
                exp_ = o.exp_;
                if (subtract)
                    num_ -= o.num_;
                else
                    num_ += o.num_;
            }
            else
            {
                BigInt t = o.num_ << (exp_ - o.exp_);
                if (subtract)
                    num_ -= t;
                else
                    num_ += t;
            }
            normalize();
        }

        BigInt num_{0};
        unsigned exp_ = 0;
    };

} // namespace dlocal
