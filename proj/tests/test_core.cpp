#include <doctest.h>

#include "oracles.hpp"
#include "rlasso/core.hpp"

#include <limits>

using namespace rlasso;

namespace {

Dataset small_dataset() {
    Dataset d;
    d.x.resize(3, 2);
    d.x << 1, 2, 3, 4, 5, 6;
    d.y.resize(3);
    d.y << 1, 0, 1;
    d.names = {"a", "b"};
    return d;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an rlasso::Error");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("validate_dataset accepts a well-formed 3x2 dataset") {
    CHECK_NOTHROW(validate_dataset(small_dataset()));
}

TEST_CASE("validate_dataset rejects malformed input") {
    SUBCASE("y longer than x") {
        Dataset d = small_dataset();
        d.y.resize(4);
        d.y.setZero();
        CHECK(kind_of([&] { validate_dataset(d); }) == ErrorKind::DimensionMismatch);
    }
    SUBCASE("non-finite design entry names its location") {
        Dataset d = small_dataset();
        d.x(2, 1) = std::numeric_limits<double>::quiet_NaN();
        try {
            validate_dataset(d);
            FAIL("no error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NonFiniteEntry);
            CHECK(std::string(e.what()).find("row 3, column 2") != std::string::npos);
        }
    }
    SUBCASE("non-finite response") {
        Dataset d = small_dataset();
        d.y(0) = std::numeric_limits<double>::infinity();
        CHECK(kind_of([&] { validate_dataset(d); }) == ErrorKind::NonFiniteEntry);
    }
    SUBCASE("duplicate names") {
        Dataset d = small_dataset();
        d.names = {"a", "a"};
        CHECK(kind_of([&] { validate_dataset(d); }) == ErrorKind::DuplicateName);
    }
    SUBCASE("wrong number of names") {
        Dataset d = small_dataset();
        d.names = {"a"};
        CHECK(kind_of([&] { validate_dataset(d); }) == ErrorKind::DimensionMismatch);
    }
}

TEST_CASE("validate_restrictions") {
    SUBCASE("benchmark restrictions on six coefficients") {
        RestrictionSet r;
        r.rmat.resize(2, 6);
        r.rmat << 0, 1, 0, -1, 0, 0, 0, 0, 1, 2, 1, 0;
        r.rvec.resize(2);
        r.rvec << 0, 10;
        CHECK_NOTHROW(validate_restrictions(r, 6));
        CHECK(kind_of([&] { validate_restrictions(r, 5); }) == ErrorKind::ShapeMismatch);
    }
    SUBCASE("duplicated row is rank deficient") {
        RestrictionSet r;
        r.rmat.resize(2, 3);
        r.rmat << 1, 2, 3, 1, 2, 3;
        r.rvec = Eigen::VectorXd::Zero(2);
        CHECK(kind_of([&] { validate_restrictions(r, 3); }) == ErrorKind::RankDeficient);
    }
    SUBCASE("m = p identity is accepted") {
        RestrictionSet r{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(2)};
        CHECK_NOTHROW(validate_restrictions(r, 2));
    }
    SUBCASE("m > p") {
        RestrictionSet r{Eigen::MatrixXd::Ones(3, 2), Eigen::VectorXd::Ones(3)};
        CHECK(kind_of([&] { validate_restrictions(r, 2); }) == ErrorKind::TooManyRows);
    }
    SUBCASE("r length differs from m") {
        RestrictionSet r{Eigen::MatrixXd::Identity(2, 3), Eigen::VectorXd::Ones(3)};
        CHECK(kind_of([&] { validate_restrictions(r, 3); }) == ErrorKind::ShapeMismatch);
    }
}

TEST_CASE("validate_restrictions separates independent from dependent rows (property)") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = oracle::uniform_int(rng, 2, 10);
        const int m = oracle::uniform_int(rng, 1, p);
        RestrictionSet ok{oracle::random_matrix(rng, m, p), oracle::random_vector(rng, m)};
        CHECK_NOTHROW(validate_restrictions(ok, p));

        if (m < 2) continue;
        // Replace one row by a random combination of the others.
        RestrictionSet bad = ok;
        const int target = oracle::uniform_int(rng, 0, m - 1);
        Eigen::RowVectorXd combo = Eigen::RowVectorXd::Zero(p);
        const Eigen::VectorXd w = oracle::random_vector(rng, m);
        for (int i = 0; i < m; ++i) {
            if (i != target) combo += w(i) * ok.rmat.row(i);
        }
        bad.rmat.row(target) = combo;
        CHECK(kind_of([&] { validate_restrictions(bad, p); }) == ErrorKind::RankDeficient);
    }
}

TEST_CASE("validate_config") {
    FitConfig cfg;
    CHECK_NOTHROW(validate_config(cfg, 3));
    cfg.lambda = -1;
    CHECK(kind_of([&] { validate_config(cfg, 3); }) == ErrorKind::InvalidConfig);
    cfg = FitConfig{};
    cfg.max_iter = 0;
    CHECK(kind_of([&] { validate_config(cfg, 3); }) == ErrorKind::InvalidConfig);
    cfg = FitConfig{};
    cfg.penalize_mask = {true, false};
    CHECK(kind_of([&] { validate_config(cfg, 3); }) == ErrorKind::InvalidConfig);
}
