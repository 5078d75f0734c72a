#include "survey/rational.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace survey {

std::optional<Rational> parse_rational(std::string_view text) {
    // trim
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) return std::nullopt;

    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
        if (text.empty()) return std::nullopt;
    }

    auto all_digits = [](std::string_view s) {
        if (s.empty()) return false;
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    };

    Rational result;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::string_view num = text.substr(0, slash);
        std::string_view den = text.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return std::nullopt;
        Integer n(std::string(num), 10), d(std::string(den), 10);
        if (d == 0) return std::nullopt;
        result = Rational(n, d);
        result.canonicalize();
    } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view ip = text.substr(0, dot);
        std::string_view fp = text.substr(dot + 1);
        if (ip.empty() && fp.empty()) return std::nullopt;
        if (!ip.empty() && !all_digits(ip)) return std::nullopt;
        if (!fp.empty() && !all_digits(fp)) return std::nullopt;
        Integer n = ip.empty() ? Integer(0) : Integer(std::string(ip), 10);
        Integer scale = 1;
        for (char c : fp) {
            n = n * 10 + (c - '0');
            scale *= 10;
        }
        result = Rational(n, scale);
        result.canonicalize();
    } else {
        if (!all_digits(text)) return std::nullopt;
        result = Rational(Integer(std::string(text), 10));
    }
    if (negative) result = -result;
    return result;
}

std::string decimal_string(const Rational& r, int significant_digits) {
    if (r == 0) return "0";
    Integer num = abs(r.get_num());
    Integer den = r.get_den();

    // decimal exponent: number of digits before the point (may be <= 0)
    int exponent = 0;
    Integer n = num, d = den;
    while (n >= d) {
        d *= 10;
        ++exponent;
    }
    while (n * 10 < d) {
        n *= 10;
        --exponent;
    }
    // now 1/10 <= num/den scaled < 1; extract significant digits
    Integer scaled = num, divisor = den;
    int shift = significant_digits - exponent;
    for (int i = 0; i < shift; ++i) scaled *= 10;
    for (int i = 0; i < -shift; ++i) divisor *= 10;
    Integer q, rem;
    mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), scaled.get_mpz_t(), divisor.get_mpz_t());
    // round half up on the remainder
    if (rem * 2 >= divisor) q += 1;
    std::string digits = q.get_str();
    // q can gain a digit from rounding
    int point = exponent + static_cast<int>(digits.size()) - significant_digits;

    std::ostringstream out;
    if (sgn(r) < 0) out << '-';
    if (point <= 0) {
        out << "0.";
        for (int i = 0; i < -point; ++i) out << '0';
        out << digits;
    } else if (point >= static_cast<int>(digits.size())) {
        out << digits;
        for (int i = 0; i < point - static_cast<int>(digits.size()); ++i) out << '0';
    } else {
        out << digits.substr(0, point) << '.' << digits.substr(point);
    }
    std::string s = out.str();
    // strip trailing zeros after a decimal point
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

Rational floor_to_denominator(const Rational& r, unsigned long n) {
    if (sgn(r) < 0) throw std::invalid_argument("floor_to_denominator: negative value");
    if (n == 0) throw std::invalid_argument("floor_to_denominator: zero denominator");
    Integer k = r.get_num() * n / r.get_den();  // floor since r >= 0
    Rational out(k, Integer(n));
    out.canonicalize();
    return out;
}

bool is_canonical(const Rational& r) {
    if (sgn(r.get_den()) <= 0) return false;
    Integer g;
    mpz_gcd(g.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return g == 1 || r.get_num() == 0;
}

}  // namespace survey
