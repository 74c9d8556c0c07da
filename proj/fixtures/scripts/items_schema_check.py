import os

import requests

BASE_URL = os.environ.get("API_BASE_URL", "http://127.0.0.1:8080")


def test_list_items_schema():
    response = requests.get(f"{BASE_URL}/items", timeout=10)
    assert response.status_code == 200
    for item in response.json():
        assert "name" in item, "item is missing required property name"
