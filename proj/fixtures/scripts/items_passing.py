import os

import requests

BASE_URL = os.environ.get("API_BASE_URL", "http://127.0.0.1:8080")


def test_get_existing_item():
    response = requests.get(f"{BASE_URL}/items/1", timeout=10)
    assert response.status_code == 200
    assert response.json()["name"] == "apple"


def test_get_missing_item():
    response = requests.get(f"{BASE_URL}/items/999", timeout=10)
    assert response.status_code == 404
