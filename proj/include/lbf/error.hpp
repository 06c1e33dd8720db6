#pragma once

#include <stdexcept>
#include <string>

namespace lbf {

// Every error raised by the library derives from Error, so callers that only
// care about "something went wrong" can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Training data that cannot produce a binary scorer (e.g. one class only).
class DegenerateData : public Error {
public:
    using Error::Error;
};

// AUC/AUPRC/F1v requested on inputs where the metric has no value.
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

class InfeasibleThreshold : public Error {
public:
    using Error::Error;
};

// The classifier alone does not fit in the space budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class GenerationTimeout : public Error {
public:
    using Error::Error;
};

}  // namespace lbf
