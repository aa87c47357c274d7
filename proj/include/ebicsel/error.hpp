#pragma once
#include <ebicsel/types.hpp>
#include <stdexcept>
#include <string>

namespace ebicsel {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
public:
    using Error::Error;
};

class InvalidConfig : public Error
{
public:
    using Error::Error;
};

class InvalidData : public Error
{
public:
    using Error::Error;
};

/// Perfect interpolation (rss <= 0) where a criterion value was requested.
class DegenerateFit : public Error
{
public:
    using Error::Error;
};

/// Every candidate support on a path was rejected during scoring.
class EmptyPath : public Error
{
public:
    using Error::Error;
};

class RankDeficient : public Error
{
public:
    explicit RankDeficient(SupportSet support)
        : Error("rank-deficient design on support of size " + std::to_string(support.size())),
          support_(std::move(support))
    {}

    const SupportSet& support() const { return support_; }

private:
    SupportSet support_;
};

} // namespace ebicsel
