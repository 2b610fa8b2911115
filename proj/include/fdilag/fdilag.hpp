#pragma once

#include "fdilag/error.hpp"
#include "fdilag/export.hpp"
#include "fdilag/lagcorr.hpp"
#include "fdilag/panel.hpp"
#include "fdilag/ranksize.hpp"
#include "fdilag/reference_data.hpp"
#include "fdilag/report.hpp"
#include "fdilag/tdist.hpp"
#include "fdilag/trends.hpp"
#include "fdilag/worldbank.hpp"
