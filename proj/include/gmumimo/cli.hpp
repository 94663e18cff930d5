// SPDX-License-Identifier: Apache-2.0
//
// gmumimo: coded generalized MU-MIMO detection and capacity toolkit
// Copyright (C) 2026 The gmumimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

namespace gmumimo {

inline constexpr const char* kVersion = "0.1.0";

/// Command-line entry point. Returns 0 on success, 1 on configuration or usage
/// errors, 2 on runtime failures.
int run_cli(int argc, char** argv);

} // namespace gmumimo
