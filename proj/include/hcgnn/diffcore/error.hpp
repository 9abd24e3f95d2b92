// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hcgnn {

/// Raised when an operation's precondition or a data invariant is violated.
class Fault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A primitive produced or received a NaN/Inf value.
class NumericFault : public Fault {
public:
    NumericFault(const std::string& what, std::size_t index)
        : Fault(what + " (non-finite value at flat index " + std::to_string(index) + ")"),
          index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace hcgnn
