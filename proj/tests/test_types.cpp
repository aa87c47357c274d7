#include <doctest.h>
#include <ebicsel/error.hpp>
#include <ebicsel/types.hpp>

using namespace ebicsel;

TEST_SUITE("types")
{
    TEST_CASE("support sets stay strictly increasing")
    {
        CHECK_THROWS_AS(SupportSet({3, 1}), InvalidArgument);
        CHECK_THROWS_AS(SupportSet({1, 1}), InvalidArgument);
        CHECK_THROWS_AS(SupportSet({-1, 2}), InvalidArgument);
        CHECK(SupportSet::from_unsorted({5, 1, 5, 3}) == SupportSet{1, 3, 5});
        CHECK(SupportSet::iota(3) == SupportSet{0, 1, 2});
        CHECK(SupportSet().empty());
    }

    TEST_CASE("membership and set sizes")
    {
        const SupportSet a{1, 4, 7, 9}, b{0, 4, 9, 12};
        CHECK(a.contains(7));
        CHECK_FALSE(a.contains(8));
        CHECK(intersection_size(a, b) == 2);
        CHECK(difference_size(a, b) == 2);
        CHECK(difference_size(b, SupportSet{}) == 4);
        CHECK(is_subset(SupportSet{4, 9}, a));
        CHECK_FALSE(is_subset(SupportSet{4, 5}, a));
        CHECK(is_subset(SupportSet{}, a));
    }

    TEST_CASE("lift maps local positions through the parent")
    {
        const SupportSet parent{2, 5, 11, 40};
        CHECK(SupportSet({0, 3}).lift(parent) == SupportSet{2, 40});
        CHECK(SupportSet().lift(parent).empty());
        CHECK_THROWS_AS(SupportSet({4}).lift(parent), InvalidArgument);
    }

    TEST_CASE("columns copies the listed columns in order")
    {
        Eigen::MatrixXd x(2, 4);
        x << 1, 2, 3, 4, 5, 6, 7, 8;
        const Eigen::MatrixXd c = columns(x, SupportSet{1, 3});
        CHECK(c.cols() == 2);
        CHECK(c(0, 0) == 2);
        CHECK(c(1, 1) == 8);
    }
}
