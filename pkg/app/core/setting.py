from decouple import config

# 센서스 아카이브 데이터베이스
DATABASE_URL = config("QMAT_DATABASE_URL", default="sqlite:///./qmatroid.db")
