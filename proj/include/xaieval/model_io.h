/*
 * Copyright 2026 The xaieval Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef XAIEVAL_MODEL_IO_H_
#define XAIEVAL_MODEL_IO_H_

#include <memory>

#include "json.hpp"
#include "xaieval/predictor.h"

namespace xaieval::models {

// Rebuilds a predictor from the document produced by Predictor::ToJson.
// Throws InputError on an unknown format, version or family.
std::unique_ptr<Predictor> PredictorFromJson(const nlohmann::json& doc);

}  // namespace xaieval::models

#endif  // XAIEVAL_MODEL_IO_H_
