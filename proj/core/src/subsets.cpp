#include "poolmax/subsets.hpp"

#include "poolmax/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <numeric>
#include <string>

namespace poolmax {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

void check_cardinality(std::size_t p, std::size_t q) {
    if (q < 1 || q > p) {
        fail(ErrorKind::BadCardinality,
             "subset size q=" + std::to_string(q) + " must satisfy 1 <= q <= p=" + std::to_string(p));
    }
}

void check_coprime_window(std::size_t p, std::size_t q) {
    if (q < 1 || q >= p) {
        fail(ErrorKind::BadCardinality,
             "circular subsets need 1 <= q < p, got q=" + std::to_string(q) + ", p=" + std::to_string(p));
    }
    if (gcd(p, q) != 1) {
        std::string msg = "q must be coprime with p (gcd(" + std::to_string(p) + ", " + std::to_string(q) +
                          ") = " + std::to_string(gcd(p, q)) + ")";
        if (auto alt = nearest_coprime(p, q)) msg += "; nearest coprime q is " + std::to_string(*alt);
        fail(ErrorKind::NotCoprime, msg);
    }
}

}  // namespace

SubsetFamily::SubsetFamily(std::size_t p, std::size_t q, std::vector<IndexSet> members)
    : p_(p), q_(q), members_(std::move(members)) {
    check_cardinality(p_, q_);
    if (members_.empty()) fail(ErrorKind::BadCardinality, "subset family must contain at least one subset");
    for (std::size_t l = 0; l < members_.size(); ++l) {
        IndexSet& s = members_[l];
        std::sort(s.begin(), s.end());
        const bool distinct = std::adjacent_find(s.begin(), s.end()) == s.end();
        if (s.size() != q_ || !distinct) {
            fail(ErrorKind::BadCardinality,
                 "subset " + std::to_string(l + 1) + " must have exactly " + std::to_string(q_) + " distinct indices");
        }
        if (s.front() < 1 || s.back() > p_) {
            fail(ErrorKind::BadCardinality,
                 "subset " + std::to_string(l + 1) + " has an index outside 1.." + std::to_string(p_));
        }
    }
}

std::size_t gcd(std::size_t a, std::size_t b) {
    while (b != 0) {
        const std::size_t r = a % b;
        a = b;
        b = r;
    }
    return a;
}

std::optional<std::size_t> nearest_coprime(std::size_t p, std::size_t q) noexcept {
    if (p < 2) return std::nullopt;
    for (std::size_t delta = 0; delta < p; ++delta) {
        if (q > delta) {
            const std::size_t lo = q - delta;
            if (lo >= 1 && lo < p && gcd(p, lo) == 1) return lo;
        }
        const std::size_t hi = q + delta;
        if (hi >= 1 && hi < p && gcd(p, hi) == 1) return hi;
    }
    return std::nullopt;
}

SubsetFamily circular_family(std::size_t p, std::size_t q) {
    check_coprime_window(p, q);
    std::vector<IndexSet> members(p);
    for (std::size_t l = 1; l <= p; ++l) {
        IndexSet& s = members[l - 1];
        s.reserve(q);
        for (std::size_t k = 0; k < q; ++k) {
            std::size_t idx = l + k;
            if (idx > p) idx -= p;
            s.push_back(idx);
        }
    }
    return SubsetFamily(p, q, std::move(members));
}

std::vector<IndexSet> random_extension(std::size_t p, std::size_t q, std::size_t count, const RngSpec& rng) {
    check_cardinality(p, q);
    PhiloxEngine engine(rng);
    std::vector<std::size_t> pool(p);
    std::vector<IndexSet> out;
    out.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        std::iota(pool.begin(), pool.end(), std::size_t{1});
        // partial Fisher-Yates: the first q slots become the sample
        for (std::size_t k = 0; k < q; ++k) {
            const std::size_t pick = k + static_cast<std::size_t>(engine.below(p - k));
            std::swap(pool[k], pool[pick]);
        }
        IndexSet s(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(q));
        std::sort(s.begin(), s.end());
        out.push_back(std::move(s));
    }
    return out;
}

SubsetFamily build_family(std::size_t p, std::size_t q, std::size_t d, const RngSpec& rng,
                          std::span<const IndexSet> user_subsets) {
    check_coprime_window(p, q);
    if (d < p) {
        fail(ErrorKind::DTooSmall, "d=" + std::to_string(d) + " must be at least p=" + std::to_string(p));
    }
    if (user_subsets.size() > d - p) {
        fail(ErrorKind::DTooSmall, std::to_string(user_subsets.size()) + " user subsets do not fit in the " +
                                       std::to_string(d - p) + " extension slots");
    }
    std::vector<IndexSet> members = circular_family(p, q).members();
    members.reserve(d);
    members.insert(members.end(), user_subsets.begin(), user_subsets.end());
    auto extra = random_extension(p, q, d - members.size(), rng);
    for (auto& s : extra) members.push_back(std::move(s));
    return SubsetFamily(p, q, std::move(members));
}

SubsetFamily singleton_family(std::size_t p) {
    std::vector<IndexSet> members(p);
    for (std::size_t j = 0; j < p; ++j) members[j] = {j + 1};
    return SubsetFamily(p, 1, std::move(members));
}

IdentifiabilityReport verify_identifiability(std::size_t p, std::size_t q, std::size_t max_p) {
    if (p > max_p) {
        fail(ErrorKind::TooLarge, "exact rank check is limited to p <= " + std::to_string(max_p) + ", got " +
                                      std::to_string(p));
    }
    if (q < 1 || q >= p) {
        fail(ErrorKind::BadCardinality,
             "window size needs 1 <= q < p, got q=" + std::to_string(q) + ", p=" + std::to_string(p));
    }

    // Row l marks the cyclic window starting at column l.
    std::vector<std::vector<Rational>> a(p, std::vector<Rational>(p, Rational(0)));
    for (std::size_t l = 0; l < p; ++l) {
        for (std::size_t k = 0; k < q; ++k) a[l][(l + k) % p] = 1;
    }

    // Reduced row echelon form.
    std::vector<std::size_t> pivot_cols;
    std::size_t row = 0;
    for (std::size_t col = 0; col < p && row < p; ++col) {
        std::size_t sel = row;
        while (sel < p && a[sel][col] == 0) ++sel;
        if (sel == p) continue;
        std::swap(a[sel], a[row]);
        const Rational inv = Rational(1) / a[row][col];
        for (std::size_t c = col; c < p; ++c) a[row][c] *= inv;
        for (std::size_t r = 0; r < p; ++r) {
            if (r == row || a[r][col] == 0) continue;
            const Rational factor = a[r][col];
            for (std::size_t c = col; c < p; ++c) a[r][c] -= factor * a[row][c];
        }
        pivot_cols.push_back(col);
        ++row;
    }

    IdentifiabilityReport report;
    report.rank = pivot_cols.size();
    report.identifiable = report.rank == p;
    if (report.identifiable) return report;

    // Kernel vector with the first free column set to 1.
    std::vector<bool> is_pivot(p, false);
    for (std::size_t c : pivot_cols) is_pivot[c] = true;
    std::size_t free_col = 0;
    while (is_pivot[free_col]) ++free_col;

    std::vector<Rational> x(p, Rational(0));
    x[free_col] = 1;
    for (std::size_t r = 0; r < pivot_cols.size(); ++r) x[pivot_cols[r]] = -a[r][free_col];

    // Clear denominators, divide out the content, make the first nonzero positive.
    BigInt lcm = 1;
    for (const auto& v : x) {
        const BigInt den = boost::multiprecision::denominator(v);
        lcm = lcm / boost::multiprecision::gcd(lcm, den) * den;
    }
    std::vector<BigInt> ints(p);
    BigInt content = 0;
    for (std::size_t j = 0; j < p; ++j) {
        ints[j] = boost::multiprecision::numerator(x[j] * Rational(lcm));
        content = boost::multiprecision::gcd(content, boost::multiprecision::abs(ints[j]));
    }
    const auto first = std::find_if(ints.begin(), ints.end(), [](const BigInt& v) { return v != 0; });
    const int sign = (first != ints.end() && *first < 0) ? -1 : 1;
    std::vector<double> witness(p);
    for (std::size_t j = 0; j < p; ++j) witness[j] = sign * (ints[j] / content).convert_to<double>() + 0.0;  // no -0
    report.witness = std::move(witness);
    return report;
}

void to_json(nlohmann::json& j, const SubsetFamily& family) {
    j = nlohmann::json{{"p", family.p()}, {"q", family.q()}, {"d", family.d()}, {"members", family.members()}};
}

SubsetFamily family_from_json(const nlohmann::json& j) {
    try {
        const auto p = j.at("p").get<std::size_t>();
        const auto q = j.at("q").get<std::size_t>();
        auto members = j.at("members").get<std::vector<IndexSet>>();
        if (j.contains("d") && j.at("d").get<std::size_t>() != members.size()) {
            fail(ErrorKind::ParseError, "subset family 'd' does not match the number of members");
        }
        return SubsetFamily(p, q, std::move(members));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, std::string("malformed subset family JSON: ") + e.what());
    }
}

}  // namespace poolmax
