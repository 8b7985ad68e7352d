// Copyright 2026 The hbench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <gtest/gtest.h>

#include "hbench/error.hpp"
#include "oracles.hpp"

#define EXPECT_HBENCH_ERROR(stmt, expected_code)                              \
  do {                                                                        \
    bool caught_ = false;                                                     \
    try {                                                                     \
      stmt;                                                                   \
    } catch (const ::hbench::Error& e_) {                                     \
      caught_ = true;                                                         \
      EXPECT_EQ(e_.code(), expected_code) << e_.what();                       \
    }                                                                         \
    EXPECT_TRUE(caught_) << "expected " << ::hbench::error_code_name(expected_code); \
  } while (0)
