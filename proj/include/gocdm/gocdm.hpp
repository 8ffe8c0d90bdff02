// SPDX-License-Identifier: Apache-2.0
//
// gocdm - generalized chirp division multiplexing simulation toolkit
// Copyright (C) 2026 The gocdm authors
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

#include "gocdm/types.hpp"
#include "gocdm/fft.hpp"
#include "gocdm/transforms.hpp"
#include "gocdm/waveform.hpp"
#include "gocdm/channel.hpp"
#include "gocdm/gf_channel.hpp"
#include "gocdm/detect.hpp"
#include "gocdm/harness.hpp"
#include "gocdm/config.hpp"
