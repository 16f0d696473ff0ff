// Copyright 2026 The concatmt Authors
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

#include "concatmt/augment.hpp"
#include "concatmt/bleu.hpp"
#include "concatmt/buckets.hpp"
#include "concatmt/corpus.hpp"
#include "concatmt/error.hpp"
#include "concatmt/judgments.hpp"
#include "concatmt/kv.hpp"
#include "concatmt/mix.hpp"
#include "concatmt/pipeline.hpp"
#include "concatmt/report.hpp"
#include "concatmt/rng.hpp"
#include "concatmt/text.hpp"
#include "concatmt/translate.hpp"
