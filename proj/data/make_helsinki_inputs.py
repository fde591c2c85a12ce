"""Writes the boundary and the synthetic population grid used with helsinki_center.osm.

The OSM extract is real (ODbL); there is no population raster for it in the repo, so a
smooth synthetic one in WGS84 degrees stands in.
"""
import json
import math

boundary = [[24.9380, 60.1660], [24.9510, 60.1660], [24.9510, 60.1760], [24.9380, 60.1760], [24.9380, 60.1660]]
with open("helsinki_boundary.geojson", "w") as f:
    json.dump({"type": "FeatureCollection", "features": [{"type": "Feature", "properties": {"name": "helsinki_center"},
               "geometry": {"type": "Polygon", "coordinates": [boundary]}}]}, f)
    f.write("\n")

ncols, nrows, cell = 130, 60, 0.001
xll, yll = 24.880, 60.140
with open("helsinki_population.asc", "w") as f:
    f.write(f"ncols {ncols}\nnrows {nrows}\nxllcorner {xll}\nyllcorner {yll}\ncellsize {cell}\nNODATA_value -9999\n")
    for r in range(nrows):
        lat = yll + (nrows - r - 0.5) * cell
        row = []
        for c in range(ncols):
            lon = xll + (c + 0.5) * cell
            d = math.hypot((lon - 24.944) * 55.5, (lat - 60.170) * 111.2)  # km from the centre
            row.append(str(int(round(30 + 25 * math.exp(-d / 0.8) + 10 * math.sin(7 * lon) * math.cos(11 * lat)))))
        f.write(" ".join(row) + "\n")
