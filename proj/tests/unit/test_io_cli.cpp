#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "openbook/io.hpp"

using namespace obl;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "openbook_unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

int lab(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  return code;
}

}  // namespace

TEST_CASE("numbers print in shortest round-trip form") {
  CHECK(io::number(0.1) == "0.1");
  CHECK(std::stod(io::number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("book round-trip") {
  const OpenBook b = OpenBook::planar(3, 2, {0.0, 1.0, 2.5}, {1, 3, 2});
  const OpenBook c = io::book_from_json(io::to_json(b));
  CHECK(c.spine.same_as(b.spine));
  REQUIRE(c.sheet_count() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(c.sheets[i].normal == b.sheets[i].normal);
    CHECK(c.sheets[i].multiplicity == b.sheets[i].multiplicity);
  }
  CHECK_THROWS_AS(io::book_from_json(io::Json::parse(R"({"m": 2})")), Error);
}

TEST_CASE("current round-trip is exact") {
  const OpenBook b = OpenBook::planar(2, 1, {0.0, 2.0}, {1, 2});
  const DiscreteCurrent t = sample_open_book(b, 1.0, 0, 9, {.per_sheet_count = 50});
  std::stringstream s;
  io::write_current(s, t);
  const DiscreteCurrent u = io::read_current(s);
  CHECK(u.q == 3);
  CHECK(u.seed == 9);
  CHECK(u.measure.points == t.measure.points);
  CHECK(u.measure.weights == t.measure.weights);
  CHECK(u.tangents == t.tangents);
}

TEST_CASE("q-function round-trip is exact") {
  auto g = std::make_shared<const HalfBallGrid>(2, 0.25);
  const QFunction u = branch_fixture(g, 0.7);
  std::stringstream s;
  io::write_qfunction(s, u);
  const QFunction v = io::read_qfunction(s);
  CHECK(v.q == u.q);
  CHECK(v.zero_trace == u.zero_trace);
  CHECK(v.values == u.values);
}

TEST_CASE("malformed input is a parse error") {
  std::stringstream s("{\"m\": 2}\nnot json\n");
  CHECK_THROWS_AS(io::read_current(s), Error);
}

TEST_CASE("radius grammar") {
  CHECK(cli::parse_radii("0.5") == std::vector<double>{0.5});
  const auto r = cli::parse_radii("0.1:1:3");
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(0.1));
  CHECK(r[1] == doctest::Approx(std::sqrt(0.1)));
  CHECK(r[2] == doctest::Approx(1.0));
  CHECK_THROWS(cli::parse_radii("1:0.1"));
  CHECK_THROWS(cli::parse_radii("abc"));
}

TEST_CASE("usage errors exit with 2") {
  CHECK(lab({}) == 2);
  CHECK(lab({"nosuch"}) == 2);
  CHECK(lab({"gen", "--family", "0"}) == 2);  // seed is required
  CHECK(lab({"density", "-i", scratch("missing.jsonl").string(), "--radii", "0.5"}) == 2);
}

TEST_CASE("check fails on a handle and passes on a book") {
  const OpenBook b = OpenBook::planar(2, 1, {0.0, 2.5}, {1, 1});
  const auto book_path = scratch("book.json");
  io::write_book(book_path.string(), b);
  const auto write = [](const std::filesystem::path& p, const DiscreteCurrent& t) {
    std::ofstream f(p);
    io::write_current(f, t);
  };
  write(scratch("clean.jsonl"), sample_open_book(b, 1.0, 4000, 5));
  write(scratch("handle.jsonl"), handle_fixture(b, 0.05, 4000, 5));
  std::string out;
  CHECK(lab({"check", "-i", scratch("clean.jsonl").string(), "--cone", book_path.string()}, &out) == 0);
  CHECK(out.rfind("check,verdict", 0) == 0);
  CHECK(lab({"check", "-i", scratch("handle.jsonl").string(), "--cone", book_path.string()}) == 1);
}

TEST_CASE("gen is deterministic") {
  std::string a, b;
  const std::vector<std::string> args{"gen", "--family", "1", "--amplitude", "0.05", "--seed", "4",
                                      "--per-sheet", "40"};
  REQUIRE(lab(args, &a) == 0);
  REQUIRE(lab(args, &b) == 0);
  CHECK(a == b);
  CHECK_FALSE(a.empty());
}
