#pragma once

#include "polsqueeze/correlators.hpp"
#include "polsqueeze/depth.hpp"
#include "polsqueeze/detect.hpp"
#include "polsqueeze/entanglement.hpp"
#include "polsqueeze/error.hpp"
#include "polsqueeze/odm.hpp"
#include "polsqueeze/oracle.hpp"
#include "polsqueeze/parallel.hpp"
#include "polsqueeze/real.hpp"
#include "polsqueeze/reduced.hpp"
#include "polsqueeze/state.hpp"
#include "polsqueeze/verify.hpp"
#include "polsqueeze/version.hpp"
