#include "arnnsci/determinant.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace arnnsci;

TEST_CASE("bitstring round trip and reading order") {
  const auto c = Configuration::from_string("00110011");
  CHECK(c.n_spin_orbitals == 8);
  CHECK(c.to_string() == "00110011");
  CHECK(c.occupied(2));
  CHECK_FALSE(c.occupied(0));
  CHECK(aufbau(8, 4) == c);
}

TEST_CASE("popcount_block") {
  const auto hf = Configuration::from_string("00110011");
  CHECK(popcount_block(hf, SpinBlock::down) == 2);
  CHECK(popcount_block(hf, SpinBlock::up) == 2);
  CHECK(popcount_block(Configuration{0, 8}, SpinBlock::down) == 0);
  CHECK(popcount_block(Configuration{0xff, 8}, SpinBlock::up) == 4);
}

TEST_CASE("passes_symmetry") {
  const auto s = SymmetrySector::trivial(4, 4);
  CHECK(passes_symmetry(Configuration::from_string("00110011"), s));
  CHECK_FALSE(passes_symmetry(Configuration::from_string("00100011"), s));
  // one down and one up electron moved from spatial 1 to spatial 2
  CHECK(passes_symmetry(Configuration::from_string("01010101"), s));
  CHECK_FALSE(passes_symmetry(Configuration::from_string("01110001"), s));

  SymmetrySector g = s;
  g.orbital_irreps = {0, 1, 2, 3};
  // spatial 1 (irrep 1) and 2 (irrep 2), singly occupied in each spin -> 0
  CHECK(passes_symmetry(Configuration::from_string("01100110"), g));
  // down in spatial 2 and 0, up closed in 0 and 1: 2 ^ 1 = 3
  CHECK_FALSE(passes_symmetry(Configuration::from_string("01010011"), g));
  CHECK_THROWS_AS((void)passes_symmetry(Configuration{0, 6}, s), DimensionError);
}

TEST_CASE("count_sector and Fock totals") {
  CHECK(count_sector(24, 14, true) == 627'264);
  CHECK(count_sector(26, 10, true) == 1'656'369);
  CHECK(count_sector(28, 16, true) == 9'018'009);
  CHECK(count_sector(36, 12, true) == 344'622'096);
  CHECK(count_sector(2, 1, false) == 2);
  CHECK(count_fock_space(24) == 16'777'216);
  CHECK(count_fock_space(36) == 68'719'476'736ULL);
  CHECK_THROWS((void)count_sector(8, 3, true));
  CHECK_THROWS((void)count_sector(8, 9, false));
}

TEST_CASE("enumerate_sector agrees with exhaustive filtering") {
  for (int n_spatial : {2, 3, 4, 5, 6}) {
    for (int ne = 0; ne <= 2 * n_spatial; ++ne) {
      for (bool sz : {true, false}) {
        if (sz && ne % 2) continue;
        SymmetrySector s = SymmetrySector::trivial(n_spatial, ne, sz);
        for (int k = 0; k < n_spatial; ++k) s.orbital_irreps[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>((k * 5 + 3) % 8);
        for (std::uint8_t target : {0, 3}) {
          s.target_irrep = target;
          const int m = 2 * n_spatial;
          std::vector<Configuration> brute;
          for (u64 b = 0; b < (u64{1} << m); ++b)
            if (passes_symmetry(Configuration{b, m}, s)) brute.push_back({b, m});
          std::sort(brute.begin(), brute.end(), LexLess{});
          const auto listed = enumerate_sector(s);
          REQUIRE(listed == brute);
          CHECK(count_symmetric(s) == brute.size());
        }
      }
    }
  }
  CHECK(enumerate_sector(SymmetrySector::trivial(2, 2)).size() == 4);
  const auto empty = enumerate_sector(SymmetrySector::trivial(3, 0));
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].bits == 0);
  CHECK(count_symmetric(SymmetrySector::trivial(12, 14)) == count_sector(24, 14, true));
}

TEST_CASE("enumeration guard") {
  CHECK_THROWS_AS((void)enumerate_sector(SymmetrySector::trivial(12, 12), 100), GuardExceeded);
}

TEST_CASE("excitations") {
  const auto c = Configuration::from_string("1010");
  auto singles = excitations(c, ExcitationOrder::singles);
  std::sort(singles.begin(), singles.end(), LexLess{});
  REQUIRE(singles.size() == 2);
  CHECK(singles[0].to_string() == "0110");
  CHECK(singles[1].to_string() == "1001");
  CHECK(excitations(Configuration{0xff, 8}, ExcitationOrder::singles).empty());
  CHECK(excitations(Configuration{0xff, 8}, ExcitationOrder::doubles).empty());

  // involution and no duplicates on a random-ish state
  const auto ref = Configuration::from_string("0110100110");
  for (auto order : {ExcitationOrder::singles, ExcitationOrder::doubles}) {
    const auto ex = excitations(ref, order);
    std::set<u64> seen;
    for (const auto& e : ex) {
      CHECK(seen.insert(e.bits).second);
      CHECK(popcount_block(e, SpinBlock::down) == popcount_block(ref, SpinBlock::down));
      const auto back = excitations(e, order);
      CHECK(std::find(back.begin(), back.end(), ref) != back.end());
      CHECK(std::popcount(e.bits ^ ref.bits) == (order == ExcitationOrder::singles ? 2 : 4));
    }
  }
}

TEST_CASE("CISD of two electrons spans the sector") {
  const auto s = SymmetrySector::trivial(2, 2);
  const auto hf = aufbau(4, 2);
  auto cisd = cisd_space(hf, s);
  CHECK(cisd.front() == hf);
  std::sort(cisd.begin(), cisd.end(), LexLess{});
  CHECK(cisd == enumerate_sector(s));
}

TEST_CASE("lexicographic order") {
  CHECK(lex_less(Configuration::from_string("0011").bits, Configuration::from_string("0101").bits));
  CHECK(lex_less(Configuration::from_string("0111").bits, Configuration::from_string("1000").bits));
  CHECK_FALSE(lex_less(5, 5));
}
