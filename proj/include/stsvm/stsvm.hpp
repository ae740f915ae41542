// Copyright 2026 The stsvm Authors.
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

#include "stsvm/common.hpp"
#include "stsvm/dataset.hpp"
#include "stsvm/domain_adaptation.hpp"
#include "stsvm/evaluation.hpp"
#include "stsvm/kernel_bank.hpp"
#include "stsvm/kernel_weight_optimizer.hpp"
#include "stsvm/label_refiner.hpp"
#include "stsvm/model_io.hpp"
#include "stsvm/svm_dual.hpp"
#include "stsvm/trainer.hpp"
