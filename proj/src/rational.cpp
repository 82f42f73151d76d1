#include "relhyp/rational.hpp"

#include <stdexcept>

namespace relhyp {

Rat make_rat(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat q(mpz_class(std::to_string(num)), mpz_class(std::to_string(den)));
    q.canonicalize();
    return q;
}

Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("rat_from_string: empty string");
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            Rat q{mpz_class(s)};
            return q;
        }
        mpz_class num(s.substr(0, slash));
        mpz_class den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("rat_from_string: zero denominator in '" + s + "'");
        Rat q(num, den);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("rat_from_string: malformed rational '" + s + "'");
    }
}

std::string rat_to_string(const Rat& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

int ceil_log2(const Rat& q) {
    if (q <= 0) throw std::invalid_argument("ceil_log2: argument must be positive");
    int k = 0;
    Rat p(1);
    while (p < q) {
        p *= 2;
        ++k;
        if (k > 256) throw std::invalid_argument("ceil_log2: argument too large");
    }
    return k;
}

Rat pow2_rat(int k) {
    if (k < 0 || k > 62) throw std::invalid_argument("pow2_rat: exponent out of range");
    return make_rat(1LL << k);
}

long long rat_to_ll(const Rat& q) {
    if (q.get_den() != 1) throw std::invalid_argument("rat_to_ll: not an integer");
    if (!q.get_num().fits_slong_p()) throw std::invalid_argument("rat_to_ll: out of range");
    return q.get_num().get_si();
}

}  // namespace relhyp
