import os

from dotenv import load_dotenv

load_dotenv()

# 総当たり列挙で扱う台集合の上限
CARRIER_BOUND = int(os.getenv("CNTSETS_CARRIER_BOUND", "16"))

# 半決定手続きに与えるステップ数の既定値
DEFAULT_FUEL = int(os.getenv("CNTSETS_DEFAULT_FUEL", "10000"))

LOG_LEVEL = os.getenv("CNTSETS_LOG_LEVEL", "WARNING").upper()

# suite で同時に検査するファイル数
SUITE_WORKERS = max(1, int(os.getenv("CNTSETS_SUITE_WORKERS", "4")))
