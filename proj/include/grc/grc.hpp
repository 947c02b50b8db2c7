#pragma once

#include "grc/config.hpp"
#include "grc/consensus.hpp"
#include "grc/controller.hpp"
#include "grc/errors.hpp"
#include "grc/evaluation.hpp"
#include "grc/generator.hpp"
#include "grc/harness.hpp"
#include "grc/http_generator.hpp"
#include "grc/image.hpp"
#include "grc/image_io.hpp"
#include "grc/manifest.hpp"
#include "grc/screening.hpp"
#include "grc/scripted_generator.hpp"
#include "grc/synth.hpp"
#include "grc/transforms.hpp"
