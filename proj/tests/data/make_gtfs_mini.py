# Regenerates the gtfs_mini fixture directory and its zip twin.
import os
import zipfile

files = {
    "stops.txt": (
        "stop_id,stop_name,stop_lat,stop_lon\n"
        "S1,Central,60.1700000,24.9400000\n"
        'S2,"Kamppi, ""East""",60.1690000,24.9320000\n'
        "S3,Harbour,60.1670000,24.9500000\n"
        "S4,Airport,60.3172000,24.9633000\n"
        "S5,Broken,abc,24.9\n"
    ),
    "calendar.txt": (
        "service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,start_date,end_date\n"
        "WK,1,1,1,1,1,0,0,20240101,20241231\n"
        "SA,0,0,0,0,0,1,0,20240101,20241231\n"
    ),
    "trips.txt": (
        "route_id,service_id,trip_id\n"
        "R1,WK,T1\nR1,WK,T2\nR1,WK,T3\nR1,SA,T4\nR1,XX,T5\n"
        "R2,WK,T6\nR2,WK,T7\nR2,WK,T8\nR2,WK,T9\n"
    ),
    "stop_times.txt": (
        "trip_id,arrival_time,departure_time,stop_id,stop_sequence\r\n"
        "T1,08:00:00,08:00:00,S1,1\r\nT1,08:10:00,08:10:00,S2,2\r\nT1,08:11:00,08:11:00,S99,3\r\n"
        "T2,08:30:00,08:30:00,S1,1\r\nT2,08:40:00,08:40:00,S2,2\r\n"
        "T3,09:00:00,09:00:00,S1,1\r\n"
        "T4,12:00:00,12:00:00,S1,1\r\n"
        "T5,13:00:00,13:00:00,S1,1\r\n"
        "T6,10:00:00,10:00:00,S3,1\r\n"
        "T7,10:10:00,10:10:00,S3,1\r\n"
        "T8,10:30:00,10:30:00,S3,1\r\nT8,25:10:00,25:10:00,S2,2\r\n"
        "T9,11:00:00,11:00:00,S2,1\r\nT9,10:00:00,10:00:00,S3,2\r\n"
    ),
}

here = os.path.dirname(os.path.abspath(__file__))
os.makedirs(os.path.join(here, "gtfs_mini"), exist_ok=True)
for name, text in files.items():
    with open(os.path.join(here, "gtfs_mini", name), "w", newline="") as f:
        f.write(text)
with zipfile.ZipFile(os.path.join(here, "gtfs_mini.zip"), "w") as z:
    for name, text in files.items():
        info = zipfile.ZipInfo("gtfs_mini/" + name, date_time=(2024, 1, 1, 0, 0, 0))
        info.compress_type = zipfile.ZIP_STORED if name == "calendar.txt" else zipfile.ZIP_DEFLATED
        z.writestr(info, text)
