#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"

#include "budgetreg/datagen.hpp"
#include "budgetreg/ingest.hpp"

using namespace budgetreg;

namespace {

Dataset parse(const std::string& text, bool header = false,
              std::optional<std::size_t> label = std::nullopt) {
  std::istringstream in(text);
  return parse_csv(in, header, label);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const std::runtime_error& e) {
    return e.what();
  }
  return "";
}

Dataset labelled(std::vector<double> labels) {
  Dataset d;
  d.dim = 1;
  for (double y : labels) d.examples.push_back(Example{{1.0}, y});
  return d;
}

}  // namespace

TEST_CASE("csv parsing") {
  const Dataset d = parse("0.5,1,2\n-1e-3, 3 ,+4\n\n");
  CHECK(d.dim == 2);
  REQUIRE(d.size() == 2);
  CHECK(d.examples[0].x == std::vector<double>{0.5, 1});
  CHECK(d.examples[0].y == 2);
  CHECK(d.examples[1].x == std::vector<double>{-1e-3, 3});
  CHECK(d.examples[1].y == 4);

  const Dataset h = parse("a,b,label\n1,2,3\r\n", true);
  CHECK(h.size() == 1);
  const Dataset first = parse("7,1,2\n", false, 0);
  CHECK(first.examples[0].y == 7);
  CHECK(first.examples[0].x == std::vector<double>{1, 2});
}

TEST_CASE("csv errors name the line") {
  CHECK(error_of("1,2\n3,4,5\n").find("line 2") != std::string::npos);
  CHECK(error_of("1,2\n3,x\n").find("line 2, column 2") != std::string::npos);
  CHECK(error_of("1,2\n,4\n").find("line 2") != std::string::npos);
  CHECK(error_of("").find("empty file") != std::string::npos);
  CHECK(error_of("5\n").find("line 1") != std::string::npos);
  CHECK(error_of("1,nan\n").find("line 1") != std::string::npos);
  CHECK_THROWS_AS(parse("1,2\n", false, 4), std::runtime_error);
}

TEST_CASE("label binarization") {
  const Dataset b = binarize_labels(labelled({3, 5, 5}), 5);
  CHECK(b.examples[0].y == -1);
  CHECK(b.examples[1].y == 1);
  CHECK(b.examples[2].y == 1);
  const Dataset kept = binarize_labels(labelled({3, 5, 7, 3}), 3, std::vector<double>{3, 5});
  CHECK(kept.size() == 3);
  CHECK(kept.examples[2].y == 1);
  CHECK_THROWS_AS(binarize_labels(labelled({2, 2}), 2), std::invalid_argument);
  CHECK_THROWS_AS(binarize_labels(labelled({1, 2}), 9), std::invalid_argument);
}

TEST_CASE("normalization") {
  Dataset l2;
  l2.dim = 2;
  l2.examples = {{{3, 4}, 1}, {{0, 1}, 0}};
  const Dataset n = normalize(l2, Regime::l2);
  CHECK(n.examples[0].x[0] == doctest::Approx(0.6));
  CHECK(n.examples[0].x[1] == doctest::Approx(0.8));
  CHECK(n.examples[1].x[1] == doctest::Approx(0.2));
  CHECK(n.examples[0].y == 1);

  Dataset linf;
  linf.dim = 2;
  linf.examples = {{{2, 5}, 0}, {{-1, 10}, 0}};
  const Dataset m = normalize(linf, Regime::linf);
  CHECK(m.examples[0].x == std::vector<double>{1, 0.5});
  CHECK(m.examples[1].x == std::vector<double>{-0.5, 1});

  for (Regime r : {Regime::l2, Regime::linf}) {
    const Dataset once = normalize(l2, r);
    CHECK(inside_unit_ball(once, r));
    const Dataset twice = normalize(once, r);
    for (std::size_t t = 0; t < once.size(); ++t) {
      for (std::size_t i = 0; i < 2; ++i) {
        CHECK(twice.examples[t].x[i] == doctest::Approx(once.examples[t].x[i]).epsilon(1e-15));
      }
    }
  }
  CHECK_FALSE(inside_unit_ball(l2, Regime::l2));

  const Normalizer fitted = Normalizer::fit(l2, Regime::l2);
  Dataset test;
  test.dim = 2;
  test.examples = {{{6, 8}, 0}, {{0.3, 0.4}, 0}};
  const auto applied = fitted.apply(test);
  CHECK(applied.rescaled == 1);
  CHECK(norm(applied.dataset.examples[0].x, NormKind::two) == doctest::Approx(1.0));
  CHECK(applied.dataset.examples[1].x[0] == doctest::Approx(0.06));

  Dataset zero;
  zero.dim = 1;
  zero.examples = {{{0.0}, 1.0}};
  CHECK_THROWS_AS(normalize(zero, Regime::l2), std::invalid_argument);
}

TEST_CASE("csv round trip") {
  const SyntheticData s = generate_synthetic(6, -0.5, Regime::l2, 50, 2);
  std::ostringstream out;
  write_csv(s.dataset, out);
  std::istringstream in(out.str());
  const Dataset back = parse_csv(in);
  REQUIRE(back.size() == 50);
  for (std::size_t t = 0; t < 50; ++t) {
    CHECK(back.examples[t].x == s.dataset.examples[t].x);
    CHECK(back.examples[t].y == s.dataset.examples[t].y);
  }
  CHECK(format_number(0.1) == "0.10000000000000001");

  const auto path = std::filesystem::temp_directory_path() / "budgetreg_ingest_roundtrip.csv";
  write_csv(s.dataset, path);
  CHECK(load_csv(path).size() == 50);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_csv(path), std::runtime_error);
}
