#include "poolmax/error.hpp"
#include "poolmax/subsets.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

using namespace poolmax;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Usage;
}

// Sum of mu over the cyclic window starting at 0-based l.
double window_sum(const std::vector<double>& mu, std::size_t l, std::size_t q) {
    double s = 0.0;
    for (std::size_t k = 0; k < q; ++k) s += mu[(l + k) % mu.size()];
    return s;
}

}  // namespace

TEST(Subsets, Gcd) {
    EXPECT_EQ(gcd(100, 49), 1u);
    EXPECT_EQ(gcd(100, 50), 50u);
    EXPECT_EQ(gcd(7, 7), 7u);
    EXPECT_EQ(gcd(12, 18), 6u);
}

TEST(Subsets, NearestCoprime) {
    EXPECT_EQ(nearest_coprime(100, 50), 49u);
    EXPECT_EQ(nearest_coprime(100, 49), 49u);
    EXPECT_EQ(nearest_coprime(6, 3), 1u);  // 2 and 4 share factors; 1 and 5 tie, smaller first
}

TEST(Subsets, CircularFiveTwo) {
    const SubsetFamily f = circular_family(5, 2);
    const std::vector<IndexSet> expected{{1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}};
    EXPECT_EQ(f.members(), expected);
    EXPECT_EQ(f.d(), 5u);
    EXPECT_EQ(f.q(), 2u);
}

TEST(Subsets, CircularWrapsAroundP) {
    const SubsetFamily f = circular_family(100, 49);
    IndexSet expected;
    for (std::size_t j = 1; j <= 8; ++j) expected.push_back(j);
    for (std::size_t j = 60; j <= 100; ++j) expected.push_back(j);
    EXPECT_EQ(f[59], expected);  // member 60
}

TEST(Subsets, CircularCoverage) {
    for (std::size_t p : {7u, 10u, 100u}) {
        for (std::size_t q = 1; q < p; ++q) {
            if (gcd(p, q) != 1) continue;
            const SubsetFamily f = circular_family(p, q);
            std::vector<std::size_t> hits(p + 1, 0);
            for (const auto& m : f.members()) {
                ASSERT_EQ(m.size(), q);
                for (std::size_t j : m) ++hits[j];
            }
            for (std::size_t j = 1; j <= p; ++j) ASSERT_EQ(hits[j], q) << p << "," << q << "," << j;
        }
    }
}

TEST(Subsets, CircularErrors) {
    EXPECT_EQ(kind_of([] { (void)circular_family(100, 50); }), ErrorKind::NotCoprime);
    EXPECT_EQ(kind_of([] { (void)circular_family(5, 5); }), ErrorKind::BadCardinality);
    EXPECT_EQ(kind_of([] { (void)circular_family(5, 0); }), ErrorKind::BadCardinality);
    try {
        (void)circular_family(100, 50);
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("q must be coprime with p"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("49"), std::string::npos);
    }
}

TEST(Subsets, RandomExtension) {
    EXPECT_TRUE(random_extension(100, 49, 0, RngSpec{1, 0}).empty());
    const auto full = random_extension(3, 3, 2, RngSpec{1, 0});
    ASSERT_EQ(full.size(), 2u);
    EXPECT_EQ(full[0], (IndexSet{1, 2, 3}));
    EXPECT_EQ(full[1], (IndexSet{1, 2, 3}));
    EXPECT_EQ(kind_of([] { (void)random_extension(3, 4, 1, RngSpec{}); }), ErrorKind::BadCardinality);
}

TEST(Subsets, RandomExtensionInclusionFrequency) {
    const std::size_t count = 10000;
    const auto sets = random_extension(100, 49, count, RngSpec{2024, 3});
    std::vector<std::size_t> hits(101, 0);
    for (const auto& s : sets) {
        ASSERT_EQ(s.size(), 49u);
        ASSERT_TRUE(std::is_sorted(s.begin(), s.end()));
        ASSERT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
        for (std::size_t j : s) {
            ASSERT_GE(j, 1u);
            ASSERT_LE(j, 100u);
            ++hits[j];
        }
    }
    for (std::size_t j = 1; j <= 100; ++j) {
        EXPECT_NEAR(static_cast<double>(hits[j]) / count, 0.49, 0.02) << j;
    }
}

TEST(Subsets, BuildFamily) {
    EXPECT_EQ(build_family(5, 2, 5, RngSpec{1, 0}), circular_family(5, 2));
    const SubsetFamily f = build_family(100, 49, 200, RngSpec{7, 0});
    EXPECT_EQ(f.d(), 200u);
    const SubsetFamily circ = circular_family(100, 49);
    for (std::size_t l = 0; l < 100; ++l) EXPECT_EQ(f[l], circ[l]);
    EXPECT_EQ(build_family(100, 49, 300, RngSpec{7, 0}).d(), 300u);
    EXPECT_EQ(f, build_family(100, 49, 200, RngSpec{7, 0}));
    EXPECT_NE(f, build_family(100, 49, 200, RngSpec{8, 0}));
    EXPECT_EQ(kind_of([] { (void)build_family(100, 49, 99, RngSpec{}); }), ErrorKind::DTooSmall);
    EXPECT_EQ(kind_of([] { (void)build_family(100, 50, 200, RngSpec{}); }), ErrorKind::NotCoprime);
}

TEST(Subsets, BuildFamilyWithUserSubsets) {
    const std::vector<IndexSet> user{{5, 3}, {1, 2}};
    const SubsetFamily f = build_family(5, 2, 8, RngSpec{1, 0}, user);
    EXPECT_EQ(f[5], (IndexSet{3, 5}));
    EXPECT_EQ(f[6], (IndexSet{1, 2}));
    EXPECT_EQ(f[7].size(), 2u);
    const std::vector<IndexSet> bad{{1, 2, 3}};
    EXPECT_EQ(kind_of([&] { (void)build_family(5, 2, 6, RngSpec{}, bad); }), ErrorKind::BadCardinality);
}

TEST(Subsets, FamilyValidation) {
    EXPECT_THROW(SubsetFamily(5, 2, {{1, 1}}), Error);
    EXPECT_THROW(SubsetFamily(5, 2, {{1, 6}}), Error);
    EXPECT_THROW(SubsetFamily(5, 2, {{0, 1}}), Error);
    const SubsetFamily s = singleton_family(3);
    EXPECT_EQ(s.members(), (std::vector<IndexSet>{{1}, {2}, {3}}));
}

TEST(Subsets, IdentifiabilityExamples) {
    EXPECT_TRUE(verify_identifiability(5, 2).identifiable);
    EXPECT_EQ(verify_identifiability(5, 2).rank, 5u);

    const auto r63 = verify_identifiability(6, 3);
    EXPECT_FALSE(r63.identifiable);
    ASSERT_TRUE(r63.witness.has_value());
    EXPECT_EQ(*r63.witness, (std::vector<double>{1, -1, 0, 1, -1, 0}));

    const auto r42 = verify_identifiability(4, 2);
    EXPECT_FALSE(r42.identifiable);
    ASSERT_TRUE(r42.witness.has_value());
    EXPECT_EQ(*r42.witness, (std::vector<double>{1, -1, 1, -1}));

    EXPECT_EQ(kind_of([] { (void)verify_identifiability(65, 2); }), ErrorKind::TooLarge);
}

TEST(Subsets, IdentifiabilityMatchesCoprimality) {
    for (std::size_t p = 2; p <= 12; ++p) {
        for (std::size_t q = 1; q < p; ++q) {
            const auto r = verify_identifiability(p, q);
            ASSERT_EQ(r.identifiable, std::gcd(p, q) == 1) << p << "," << q;
            if (!r.identifiable) {
                ASSERT_TRUE(r.witness.has_value());
                const auto& mu = *r.witness;
                ASSERT_TRUE(std::any_of(mu.begin(), mu.end(), [](double v) { return v != 0.0; }));
                for (std::size_t l = 0; l < p; ++l) ASSERT_EQ(window_sum(mu, l, q), 0.0);
            } else {
                EXPECT_FALSE(r.witness.has_value());
            }
        }
    }
}

TEST(Subsets, JsonRoundTrip) {
    const SubsetFamily f = build_family(7, 3, 10, RngSpec{3, 1});
    const nlohmann::json j = f;
    EXPECT_EQ(j.at("p"), 7);
    EXPECT_EQ(j.at("q"), 3);
    EXPECT_EQ(j.at("d"), 10);
    EXPECT_EQ(family_from_json(j), f);

    nlohmann::json bad = j;
    bad["d"] = 11;
    EXPECT_THROW((void)family_from_json(bad), Error);
    EXPECT_THROW((void)family_from_json(nlohmann::json::object()), Error);
}
