// Copyright 2026 The AICL Toolkit Authors
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

// Everything except the command line (aicl/cli.hpp).

#include "aicl/binary.hpp"
#include "aicl/cbor.hpp"
#include "aicl/check_metadata.hpp"
#include "aicl/crypto.hpp"
#include "aicl/diagnostic.hpp"
#include "aicl/diff.hpp"
#include "aicl/harness.hpp"
#include "aicl/integrity.hpp"
#include "aicl/message.hpp"
#include "aicl/path.hpp"
#include "aicl/replay.hpp"
#include "aicl/text.hpp"
#include "aicl/trace.hpp"
#include "aicl/validate.hpp"
#include "aicl/value.hpp"
