#pragma once

#include "cvdp/classify.hpp"
#include "cvdp/compound.hpp"
#include "cvdp/error.hpp"
#include "cvdp/expm.hpp"
#include "cvdp/io.hpp"
#include "cvdp/lindyn.hpp"
#include "cvdp/matrix.hpp"
#include "cvdp/rfmr.hpp"
#include "cvdp/signvar.hpp"
#include "cvdp/vdp.hpp"
