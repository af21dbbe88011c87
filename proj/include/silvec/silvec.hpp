#pragma once

#include <silvec/active_contour.hpp>
#include <silvec/bezier_fit.hpp>
#include <silvec/curvature_vectorizer.hpp>
#include <silvec/distance_field.hpp>
#include <silvec/errors.hpp>
#include <silvec/geometry.hpp>
#include <silvec/metrics.hpp>
#include <silvec/pipeline.hpp>
#include <silvec/raster.hpp>
#include <silvec/svg_io.hpp>
