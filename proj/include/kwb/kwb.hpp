#pragma once

#include "kwb/error.hpp"
#include "kwb/ink.hpp"
#include "kwb/normalize.hpp"
#include "kwb/thresholds.hpp"
#include "kwb/template_store.hpp"
#include "kwb/structure.hpp"
#include "kwb/technique.hpp"
#include "kwb/precision.hpp"
#include "kwb/scoring.hpp"
#include "kwb/batch.hpp"
#include "kwb/service.hpp"
