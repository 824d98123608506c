#pragma once

#include <string>

#include "doctest.h"
#include "modalnet/error.hpp"

// Runs `expr` and checks that it throws mnet::Error of the given kind.
#define CHECK_ERROR_KIND(expr, error_kind)                                                 \
  do {                                                                                    \
    bool thrown_ = false;                                                                 \
    try {                                                                                 \
      (void)(expr);                                                                       \
    } catch (const mnet::Error& e_) {                                                     \
      thrown_ = true;                                                                     \
      CHECK_MESSAGE(e_.kind() == (error_kind), "got " << mnet::to_string(e_.kind()) << ": " \
                                                       << e_.detail());                   \
    }                                                                                     \
    CHECK_MESSAGE(thrown_, "expected " << mnet::to_string(error_kind));                   \
  } while (0)
