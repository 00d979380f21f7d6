from .app import app
from .client import ServiceClient, ServiceInputError, ServiceInternalError

__all__ = ["app", "ServiceClient", "ServiceInputError", "ServiceInternalError"]
