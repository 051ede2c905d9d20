// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "agca/common.hpp"

namespace agca::bench
{

struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string &name) const
  {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  }

  const std::string &cell(std::size_t row, const std::string &name) const
  {
    const int c = column(name);
    if (c < 0)
    {
      throw ArgumentError("CSV column '" + name + "' missing");
    }
    return rows.at(row).at(static_cast<std::size_t>(c));
  }
};

inline std::vector<std::string> split_csv_line(const std::string &line)
{
  std::vector<std::string> out;
  std::string cur;
  std::istringstream s(line);
  while (std::getline(s, cur, ','))
  {
    out.push_back(cur);
  }
  if (!line.empty() && line.back() == ',')
  {
    out.emplace_back();
  }
  return out;
}

// Reads the first comma-separated block (up to an empty line).
inline CsvTable read_csv(std::istream &is)
{
  CsvTable t;
  std::string line;
  if (!std::getline(is, line))
  {
    throw ArgumentError("empty CSV input");
  }
  t.header = split_csv_line(line);
  while (std::getline(is, line) && !line.empty())
  {
    auto row = split_csv_line(line);
    row.resize(t.header.size());
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct PlotSeries
{
  std::string label;
  std::vector<double> x, y;
};

struct PlotSpec
{
  std::string title, xlabel, ylabel;
  bool logx = false;
  bool logy = false;
};

//
// Minimal line plot with markers and a legend.
//
inline void write_svg_plot(std::ostream &os, const PlotSpec &spec, const std::vector<PlotSeries> &series)
{
  const double W = 640, H = 420, left = 70, right = 190, top = 40, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;
  auto tx = [&](double v) { return spec.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.logy ? std::log10(v) : v; };
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto &s : series)
  {
    for (std::size_t i = 0; i < s.x.size(); ++i)
    {
      if (!std::isfinite(tx(s.x[i])) || !std::isfinite(ty(s.y[i])))
      {
        continue;
      }
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (x0 > x1)
  {
    x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  }
  if (!spec.logy)
  {
    y0 = std::min(y0, 0.0);
  }
  if (x1 - x0 < 1e-12)
  {
    x0 -= 0.5, x1 += 0.5;
  }
  if (y1 - y0 < 1e-12)
  {
    y1 = y0 + 1.0;
  }
  y1 += 0.05 * (y1 - y0);
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + ph - (ty(v) - y0) / (y1 - y0) * ph; };
  static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << spec.title << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k)
  {
    const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    const double sx = left + pw * k / 4.0, sy = top + ph - ph * k / 4.0;
    std::ostringstream lx, ly;
    lx << (spec.logx ? std::pow(10.0, fx) : fx);
    ly << (spec.logy ? std::pow(10.0, fy) : std::round(fy * 100.0) / 100.0);
    os << "<text x=\"" << sx << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << lx.str()
       << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">" << ly.str()
       << "</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << sy << "\" x2=\"" << left + pw << "\" y2=\"" << sy
       << "\" stroke=\"#ddd\"/>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 14 << "\" text-anchor=\"middle\">"
     << spec.xlabel << "</text>\n";
  os << "<text transform=\"translate(18," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << spec.ylabel << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k)
  {
    const auto &s = series[k];
    const char *c = colors[k % 10];
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
    {
      if (std::isfinite(tx(s.x[i])) && std::isfinite(ty(s.y[i])))
      {
        os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      }
    }
    os << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
    {
      if (std::isfinite(tx(s.x[i])) && std::isfinite(ty(s.y[i])))
      {
        os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << c
           << "\"/>\n";
      }
    }
    const double ly = top + 12 + 16.0 * static_cast<double>(k);
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 30
       << "\" y2=\"" << ly - 4 << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 36 << "\" y=\"" << ly << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
}

inline double parse_number(const std::string &s)
{
  if (s == "inf")
  {
    return INFINITY;
  }
  return s.empty() ? NAN : std::stod(s);
}

//
// Groups rows by the label columns and plots y against x, sorted by x.
//
inline std::vector<PlotSeries> series_from_table(const CsvTable &t, const std::string &xcol,
                                                 const std::string &ycol,
                                                 const std::vector<std::string> &label_cols)
{
  std::map<std::string, PlotSeries> groups;
  std::vector<std::string> order;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
  {
    std::string label;
    for (const auto &c : label_cols)
    {
      if (t.column(c) < 0)
      {
        continue;
      }
      label += (label.empty() ? "" : " ") + t.cell(r, c);
    }
    if (!groups.count(label))
    {
      order.push_back(label);
      groups[label].label = label;
    }
    const double y = parse_number(t.cell(r, ycol));
    if (std::isnan(y))
    {
      continue;
    }
    groups[label].x.push_back(parse_number(t.cell(r, xcol)));
    groups[label].y.push_back(y);
  }
  std::vector<PlotSeries> out;
  for (const auto &k : order)
  {
    auto s = groups[k];
    std::vector<std::size_t> idx(s.x.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
    {
      idx[i] = i;
    }
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.x[a] < s.x[b]; });
    PlotSeries sorted{s.label, {}, {}};
    for (auto i : idx)
    {
      sorted.x.push_back(s.x[i]);
      sorted.y.push_back(s.y[i]);
    }
    out.push_back(std::move(sorted));
  }
  return out;
}

}  // namespace agca::bench
