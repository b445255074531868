from .app import ServiceConfig, create_app, form_from_model

__all__ = ["ServiceConfig", "create_app", "form_from_model"]
