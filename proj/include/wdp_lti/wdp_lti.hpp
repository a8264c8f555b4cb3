//
// Copyright 2026 The wdp-lti Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef WDP_LTI_WDP_LTI_HPP_
#define WDP_LTI_WDP_LTI_HPP_

#include "wdp_lti/building.hpp"
#include "wdp_lti/calibrate.hpp"
#include "wdp_lti/errors.hpp"
#include "wdp_lti/lti.hpp"
#include "wdp_lti/matgauss.hpp"
#include "wdp_lti/verify.hpp"

#endif  // WDP_LTI_WDP_LTI_HPP_
