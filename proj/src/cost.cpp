#include "vcsp/cost.hpp"

#include <cctype>

namespace vcsp {

namespace {

bool is_integer_text(std::string_view s)
{
    if (!s.empty() && s.front() == '-') s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view{} : text.substr(slash + 1);
    if (!is_integer_text(num) || (slash != std::string_view::npos && (!is_integer_text(den) || den.front() == '-')))
        throw InputError("not a rational: \"" + std::string(text) + "\"");
    Rational q;
    q.get_num() = mpz_class(std::string(num));
    q.get_den() = den.empty() ? mpz_class(1) : mpz_class(std::string(den));
    if (q.get_den() == 0) throw InputError("zero denominator: \"" + std::string(text) + "\"");
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q)
{
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_str();
}

std::string Cost::to_string() const
{
    if (infinite_) return "inf";
    return vcsp::to_string(value_);
}

Cost Cost::parse(std::string_view text)
{
    if (text == "inf") return infinity();
    return Cost(parse_rational(text));
}

}  // namespace vcsp
