#pragma once

#include <stdexcept>
#include <string>

namespace artikit {

// Base for every typed error. `code()` is a stable machine-readable tag used
// by the CLI layer to map failures onto exit codes and JSON error records.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define ARTIKIT_DEFINE_ERROR(NAME, CODE)                                      \
    class NAME : public Error {                                              \
    public:                                                                   \
        explicit NAME(const std::string& message) : Error((CODE), message) {} \
    }

ARTIKIT_DEFINE_ERROR(XmlSyntaxError, "xml-syntax");
ARTIKIT_DEFINE_ERROR(JsonSyntaxError, "json-syntax");
ARTIKIT_DEFINE_ERROR(SchemaViolationError, "schema-violation");
ARTIKIT_DEFINE_ERROR(TreeViolationError, "tree-violation");
ARTIKIT_DEFINE_ERROR(ConsistencyViolationError, "consistency-violation");
ARTIKIT_DEFINE_ERROR(InvariantViolationError, "invariant-violation");
ARTIKIT_DEFINE_ERROR(MissingMeshError, "missing-mesh");
ARTIKIT_DEFINE_ERROR(MissingConfigurationError, "missing-configuration");
ARTIKIT_DEFINE_ERROR(LimitViolationError, "limit-violation");
ARTIKIT_DEFINE_ERROR(ParseError, "parse-error");
ARTIKIT_DEFINE_ERROR(EmptyCloudError, "empty-cloud");
ARTIKIT_DEFINE_ERROR(DegenerateGeometryError, "degenerate-geometry");
ARTIKIT_DEFINE_ERROR(DimensionMismatchError, "dimension-mismatch");
ARTIKIT_DEFINE_ERROR(IoError, "io-error");
ARTIKIT_DEFINE_ERROR(ZeroAxisError, "zero-axis");
ARTIKIT_DEFINE_ERROR(InvalidCountError, "invalid-count");
ARTIKIT_DEFINE_ERROR(KeyMismatchError, "key-mismatch");
ARTIKIT_DEFINE_ERROR(IndexOutOfRangeError, "index-out-of-range");
ARTIKIT_DEFINE_ERROR(DecompositionFailureError, "decomposition-failure");

#undef ARTIKIT_DEFINE_ERROR

}  // namespace artikit
