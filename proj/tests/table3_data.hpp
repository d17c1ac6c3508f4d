#pragma once

// Published per-participant PSE/DT table (16 kept participants). The source
// table prints fifteen rows plus the summary; the remaining participant's
// pair is reconstructed from the printed averages (3.50, 5.67), which pins it
// to (4.40, 7.49) up to rounding.
inline constexpr double kTable3Pse[16] = {3.22, 1.90, 4.58, 4.42, 6.06, 4.74, 3.08, 2.49,
                                          3.88, 2.61, 1.70, 2.80, 3.31, 1.97, 4.84, 4.40};
inline constexpr double kTable3Dt[16] = {4.21, 4.07, 6.56, 8.21, 8.38, 7.17, 6.20, 4.47,
                                         5.46, 3.79, 3.90, 4.21, 4.75, 3.64, 8.21, 7.49};
inline constexpr double kTable3MeanPse = 3.50;
inline constexpr double kTable3MeanDt = 5.67;
