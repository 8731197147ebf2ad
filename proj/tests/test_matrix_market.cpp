#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "seldet/error.hpp"
#include "seldet/matrix_market.hpp"

using namespace seldet;

namespace {

ErrorKind kind_of(const std::string& text) {
  std::istringstream in(text);
  try {
    read_matrix_market(in);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorKind::IoError;
}

}  // namespace

TEST(MatrixMarket, ReadsTwoByTwo) {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "% comment\n"
      "2 2 3\n1 1 4\n2 1 2\n2 2 3\n");
  const auto a = read_matrix_market(in);
  EXPECT_EQ(a.size(), 2);
  EXPECT_EQ(a(0, 0), 4.0);
  EXPECT_EQ(a(0, 1), 2.0);
  EXPECT_EQ(a(1, 1), 3.0);
}

TEST(MatrixMarket, UpperTriangleIsReflected) {
  std::istringstream in("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 2 5\n2 2 1\n");
  const auto a = read_matrix_market(in);
  EXPECT_EQ(a(1, 0), 5.0);
  EXPECT_EQ(a.nnz(), 2);
}

TEST(MatrixMarket, PatternAndIntegerFields) {
  std::istringstream p("%%MatrixMarket matrix coordinate pattern symmetric\n2 2 2\n1 1\n2 1\n");
  const auto a = read_matrix_market(p);
  EXPECT_EQ(a(1, 0), 1.0);
  EXPECT_EQ(a(0, 0), 1.0);
  std::istringstream i("%%MatrixMarket matrix coordinate integer symmetric\n1 1 1\n1 1 7\n");
  EXPECT_EQ(read_matrix_market(i)(0, 0), 7.0);
}

TEST(MatrixMarket, EmptyEntryList) {
  std::istringstream in("%%MatrixMarket matrix coordinate real symmetric\n1 1 0\n");
  const auto a = read_matrix_market(in);
  EXPECT_EQ(a.size(), 1);
  EXPECT_EQ(a.nnz(), 0);
}

TEST(MatrixMarket, Errors) {
  EXPECT_EQ(kind_of("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1\n"), ErrorKind::UnsupportedFormat);
  EXPECT_EQ(kind_of("%%MatrixMarket matrix coordinate complex symmetric\n1 1 1\n1 1 1 0\n"),
            ErrorKind::UnsupportedFormat);
  EXPECT_EQ(kind_of("%%MatrixMarket matrix array real symmetric\n1 1\n1\n"), ErrorKind::UnsupportedFormat);
  EXPECT_EQ(kind_of("%%MatrixMarket matrix coordinate real symmetric\n2 3 1\n1 1 1\n"),
            ErrorKind::UnsupportedFormat);
  EXPECT_EQ(kind_of("not a banner\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 abc\n"), ErrorKind::ParseError);
}

TEST(MatrixMarket, WritesLowerTriangleOneBased) {
  TripletList t(1);
  t.add(0, 0, 2.0);
  std::ostringstream out;
  write_matrix_market(from_triplets(t), out);
  EXPECT_NE(out.str().find("%%MatrixMarket matrix coordinate real symmetric"), std::string::npos);
  EXPECT_NE(out.str().find("\n1 1 2.0"), std::string::npos);

  std::ostringstream out2;
  write_matrix_market(oracle::tridiagonal(2, 4, 2), out2);
  std::istringstream lines(out2.str());
  std::string line;
  int entries = -1;  // size line
  while (std::getline(lines, line)) {
    if (!line.empty() && line[0] != '%') ++entries;
  }
  EXPECT_EQ(entries, 3);
}

TEST(MatrixMarket, RoundTripIsExact) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto a = oracle::random_spd(1 + static_cast<Index>(seed) * 7, 0.2, seed, 3.0);
    std::stringstream s;
    write_matrix_market(a, s);
    EXPECT_EQ(read_matrix_market(s), a);
  }
}
