#include <cstring>
#include <sstream>

#include "doctest.h"

#include "defdist/errors.hpp"
#include "defdist/gallery.hpp"
#include "defdist/matrix_market.hpp"
#include "test_support.hpp"

using namespace defdist;
using namespace defdist::mm;

TEST_SUITE("matrix_market") {

TEST_CASE("round-trip is bitwise exact") {
    auto gen = test_support::rng(42);
    for (const ComplexMatrix& A :
         {gallery::kahan(6, 0.1), gallery::grcar(5), test_support::random_complex_matrix(4, gen)}) {
        std::ostringstream os;
        write_matrix_market(os, A);
        std::istringstream is(os.str());
        ComplexMatrix B = read_matrix_market(is);
        REQUIRE(B.rows() == A.rows());
        REQUIRE(B.cols() == A.cols());
        CHECK(std::memcmp(A.entries().data(), B.entries().data(),
                          A.entries().size() * sizeof(Complex)) == 0);
    }
}

TEST_CASE("coordinate: unlisted entries are zero") {
    std::istringstream is(
        "%%MatrixMarket matrix coordinate complex general\n"
        "% a comment\n"
        "2 2 3\n"
        "1 1 1.5 0\n"
        "1 2 0 -2\n"
        "2 2 3 4\n");
    ComplexMatrix A = read_matrix_market(is);
    CHECK(A(0, 0) == Complex(1.5, 0.0));
    CHECK(A(0, 1) == Complex(0.0, -2.0));
    CHECK(A(1, 0) == Complex(0.0, 0.0));
    CHECK(A(1, 1) == Complex(3.0, 4.0));
}

TEST_CASE("CRLF line endings are accepted") {
    std::istringstream is(
        "%%MatrixMarket matrix coordinate complex general\r\n"
        "2 2 1\r\n"
        "1 2 3 -4\r\n");
    ComplexMatrix A = read_matrix_market(is);
    CHECK(A(0, 1) == Complex(3.0, -4.0));
}

TEST_CASE("real field promotes to complex") {
    std::istringstream is(
        "%%MatrixMarket matrix coordinate real general\n"
        "2 2 2\n"
        "1 1 2.5\n"
        "2 1 -1\n");
    ComplexMatrix A = read_matrix_market(is);
    CHECK(A(0, 0) == Complex(2.5, 0.0));
    CHECK(A(1, 0) == Complex(-1.0, 0.0));
}

TEST_CASE("array format is column-major") {
    std::istringstream is(
        "%%MatrixMarket matrix array real general\n"
        "2 2\n"
        "1\n"
        "2\n"
        "3\n"
        "4\n");
    ComplexMatrix A = read_matrix_market(is);
    CHECK(A(0, 0) == Complex(1.0, 0.0));
    CHECK(A(1, 0) == Complex(2.0, 0.0));
    CHECK(A(0, 1) == Complex(3.0, 0.0));
    CHECK(A(1, 1) == Complex(4.0, 0.0));
}

TEST_CASE("array complex entries") {
    std::istringstream is(
        "%%MatrixMarket matrix array complex general\n"
        "1 2\n"
        "1 -1\n"
        "0 2\n");
    ComplexMatrix A = read_matrix_market(is);
    CHECK(A(0, 0) == Complex(1.0, -1.0));
    CHECK(A(0, 1) == Complex(0.0, 2.0));
}

TEST_CASE("unsupported qualifiers") {
    std::istringstream p("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n");
    CHECK_THROWS_AS(read_matrix_market(p), UnsupportedFormatError);
    std::istringstream s(
        "%%MatrixMarket matrix coordinate complex symmetric\n2 2 1\n1 1 1 0\n");
    CHECK_THROWS_AS(read_matrix_market(s), UnsupportedFormatError);
    std::istringstream h(
        "%%MatrixMarket matrix coordinate complex hermitian\n2 2 1\n1 1 1 0\n");
    CHECK_THROWS_AS(read_matrix_market(h), UnsupportedFormatError);
    std::istringstream v("%%MatrixMarket vector coordinate complex general\n2 1 1\n1 1 1 0\n");
    CHECK_THROWS_AS(read_matrix_market(v), UnsupportedFormatError);
}

TEST_CASE("parse errors carry line numbers") {
    {
        std::istringstream is("not a matrix market file\n");
        try {
            read_matrix_market(is);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 1);
        }
    }
    {
        // bad numeric token on line 4
        std::istringstream is(
            "%%MatrixMarket matrix coordinate complex general\n"
            "2 2 2\n"
            "1 1 1 0\n"
            "2 2 oops 0\n");
        try {
            read_matrix_market(is);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 4);
        }
    }
    {
        // out-of-range index
        std::istringstream is(
            "%%MatrixMarket matrix coordinate complex general\n"
            "2 2 1\n"
            "3 1 1 0\n");
        CHECK_THROWS_AS(read_matrix_market(is), ParseError);
    }
    {
        // duplicate entry
        std::istringstream is(
            "%%MatrixMarket matrix coordinate complex general\n"
            "2 2 2\n"
            "1 1 1 0\n"
            "1 1 2 0\n");
        CHECK_THROWS_AS(read_matrix_market(is), ParseError);
    }
    {
        // truncated entry list
        std::istringstream is(
            "%%MatrixMarket matrix coordinate complex general\n"
            "2 2 2\n"
            "1 1 1 0\n");
        CHECK_THROWS_AS(read_matrix_market(is), ParseError);
    }
    {
        // non-finite value
        std::istringstream is(
            "%%MatrixMarket matrix coordinate complex general\n"
            "2 2 1\n"
            "1 1 nan 0\n");
        CHECK_THROWS_AS(read_matrix_market(is), ParseError);
    }
    {
        // trailing garbage
        std::istringstream is(
            "%%MatrixMarket matrix coordinate complex general\n"
            "2 2 1\n"
            "1 1 1 0\n"
            "9 9 9 9\n");
        CHECK_THROWS_AS(read_matrix_market(is), ParseError);
    }
}

TEST_CASE("writer emits one line per nonzero") {
    std::ostringstream os;
    write_matrix_market(os, gallery::grcar(4));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "%%MatrixMarket matrix coordinate complex general");
    std::getline(is, line);
    CHECK(line == "4 4 13");
    std::size_t entries = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++entries;
    CHECK(entries == 13);
}

TEST_CASE("missing file raises an error naming the path") {
    try {
        read_matrix_market(std::string("definitely_missing.mtx"));
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("definitely_missing.mtx") != std::string::npos);
    }
}

}  // TEST_SUITE
